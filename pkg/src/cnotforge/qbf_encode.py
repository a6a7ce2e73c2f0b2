"""Compact QBF encoding: one symbolic matrix row instead of n explicit rows.

A universally quantified binary row index ``R`` selects a row; existential
one-hot flags ``r_i`` mirror it, and ``mc[t][c]`` holds column ``c`` of that
row at time ``t``. The action variables (``ctrl``/``tgt`` for count,
``cnot``/``tgt`` for depth) form the outermost block, so a winning outer
assignment is the plan itself. Only strong variants are supported.
"""

from __future__ import annotations

from .cnf import CnfInstance, VarPool, at_most_one, differ, equal, exactly_one
from .gf2 import ParityMatrix
from .plan import Plan, check_plan
from .qbf import QbfInstance, expand
from .sat_encode import DecodeError, decode, normalize_variant, resolve_coupling

MAX_EXPAND_N = 8


def row_bits(n: int) -> int:
    """Number of universal variables needed to address ``n`` rows."""
    return max(0, (n - 1).bit_length())


def _bin(bits: list[int], i: int) -> list[int]:
    """Literals whose conjunction says the binary row index equals ``i``."""
    return [b if (i >> pos) & 1 else -b for pos, b in enumerate(bits)]


def encode_qbf(
    m: ParityMatrix, k: int, variant: str = "S", metric: str = "count", cp=None
) -> QbfInstance:
    """QBF true iff a ``k``-step plan (count or depth) reaches ``m``."""
    variant = normalize_variant(variant)
    if variant not in ("S", "S+R"):
        raise ValueError(f"QBF encoding supports S and S+R only, not {variant}")
    if metric not in ("count", "depth"):
        raise ValueError(f"unknown metric {metric!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    n = m.n
    graph = resolve_coupling(variant, n, cp)
    pairs = sorted(graph.pairs)
    pool = VarPool()
    clauses: list[list[int]] = []

    # Outer block: actions, plus the auxiliaries of their cardinality constraints.
    for t in range(k):
        if metric == "count":
            for q in range(n):
                pool.var(("ctrl", t, q))
        else:
            for i, j in pairs:
                pool.var(("cnot", t, i, j))
        for q in range(n):
            pool.var(("tgt", t, q))
    for t in range(k):
        tgt = [pool[("tgt", t, q)] for q in range(n)]
        if metric == "count":
            ctrl = [pool[("ctrl", t, q)] for q in range(n)]
            clauses += exactly_one(ctrl, pool)
            clauses += exactly_one(tgt, pool)
            clauses += [[-ctrl[q], -tgt[q]] for q in range(n)]
            clauses += [
                [-ctrl[i], -tgt[j]]
                for i in range(n)
                for j in range(n)
                if i != j and (i, j) not in graph.pairs
            ]
        else:
            cn = {(i, j): pool[("cnot", t, i, j)] for i, j in pairs}
            for q in range(n):
                clauses += at_most_one([v for (i, j), v in cn.items() if q in (i, j)], pool)
            if cn:
                clauses.append(list(cn.values()))
            for j in range(n):
                into = [v for (i, jj), v in cn.items() if jj == j]
                clauses += [[-v, tgt[j]] for v in into]
                clauses.append([-tgt[j]] + into)
    outer = list(range(1, pool.top + 1))

    univ = [pool.var(("R", b)) for b in range(row_bits(n))]
    inner_start = pool.top + 1
    r = [pool.var(("r", i)) for i in range(n)]
    for t in range(k + 1):
        for c in range(n):
            pool.var(("mc", t, c))

    for i in range(n):
        clauses.append([-x for x in _bin(univ, i)] + [r[i]])
    clauses += exactly_one(r, pool)
    # Codes past n-1 address no row; pin r so they constrain nothing else.
    for code in range(n, 1 << len(univ)):
        clauses.append([-x for x in _bin(univ, code)] + [r[0]])

    for i in range(n):
        clauses += equal(r[i], pool[("mc", 0, i)], ())
    for i in range(n):
        for j in range(n):
            v = pool[("mc", k, j)]
            clauses.append([-r[i], v if m.bit(i, j) else -v])

    for t in range(k):
        tgt = [pool[("tgt", t, q)] for q in range(n)]
        for i, j in pairs:
            if metric == "count":
                sel: tuple[int, ...] = (pool[("ctrl", t, i)], tgt[j])
            else:
                sel = (pool[("cnot", t, i, j)],)
            src = pool[("mc", t, i)]
            cur = pool[("mc", t, j)]
            nxt = pool[("mc", t + 1, j)]
            clauses += differ(cur, nxt, sel + (src,))
            clauses += equal(cur, nxt, sel + (-src,))
        for i in range(n):
            clauses += equal(pool[("mc", t, i)], pool[("mc", t + 1, i)], (-tgt[i],))

    inner = list(range(inner_start, pool.top + 1))
    prefix = [("e", outer), ("a", univ), ("e", inner)]
    meta = {"target": m, "coupling": graph if variant == "S+R" else None}
    return QbfInstance(prefix, clauses, pool, k=k, variant=variant, metric=metric, n=n, meta=meta)


def expand_universals(q: QbfInstance) -> CnfInstance:
    """Equisatisfiable CNF obtained by expanding ``R`` over all its codes.

    Outer variables keep their ids and symbols, so ``sat_encode.decode``
    reads the plan straight from a model.
    """
    if q.n > MAX_EXPAND_N:
        raise ValueError(f"expansion budget exceeded: n = {q.n} > {MAX_EXPAND_N}")
    top, clauses = expand(q.var_count, q.prefix, q.clauses)
    pool = VarPool()
    outer = set(q.outer_vars())
    for vid in range(1, top + 1):
        sym = q.pool.by_id[vid] if vid in outer else ("aux", "copy", vid)
        pool.var(sym)
    return CnfInstance(clauses, pool, k=q.k, variant=q.variant, metric=q.metric, n=q.n,
                       meta={"at_least_one": True})


def decode_outer(model: dict[int, bool], q: QbfInstance) -> Plan:
    """Plan from an outer-block assignment; it must replay to the encoded target."""
    plan = decode(model, q)  # type: ignore[arg-type]
    if q.metric == "depth":
        for t, step in enumerate(plan.steps):
            used = [x for pair in step for x in pair]
            if len(used) != len(set(used)):
                raise DecodeError(f"step {t}: overlapping CNOTs {sorted(step)}")
    res = check_plan(q.meta["target"], plan, q.meta.get("coupling"))
    if not res.ok:
        raise DecodeError("outer assignment failed replay: " + "; ".join(res.problems))
    return plan


__all__ = ["MAX_EXPAND_N", "decode_outer", "encode_qbf", "expand_universals", "row_bits"]
