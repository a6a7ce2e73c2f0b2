"""SAT encodings of optimal CNOT synthesis as bounded reachability over parity matrices.

Two encodings share the state variables ``m[t][r][c]`` (matrix entry at time
``t``) and the per-step target flags ``tgt[t][q]``:

* count: one column addition per step, chosen by one-hot ``ctrl``/``tgt``;
* depth: one ``cnot[t][i][j]`` flag per permitted pair, several disjoint
  additions per step.

Weak variants start from an arbitrary permutation matrix instead of the
identity; restricted weak variants check the coupling graph through that
initial permutation.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .cnf import CnfInstance, VarPool, at_most_one, differ, equal, exactly_one
from .coupling import CouplingGraph, complete
from .gf2 import Pair, ParityMatrix, Permutation, gauss_synth
from .plan import Plan, check_plan

log = logging.getLogger(__name__)

VARIANTS = ("S", "W", "S+R", "W+R")
METRICS = ("count", "depth")
_ALIASES = {"s": "S", "w": "W", "sr": "S+R", "wr": "W+R", "s+r": "S+R", "w+r": "W+R"}


class DecodeError(RuntimeError):
    pass


def normalize_variant(variant: str) -> str:
    v = _ALIASES.get(variant.lower(), variant.upper())
    if v not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    return v


def is_weak(variant: str) -> bool:
    return variant.startswith("W")


def is_restricted(variant: str) -> bool:
    return variant.endswith("+R")


def resolve_coupling(variant: str, n: int, cp: CouplingGraph | None) -> CouplingGraph:
    if is_restricted(variant):
        if cp is None:
            raise ValueError(f"variant {variant} needs a coupling graph")
        if cp.n != n:
            raise ValueError(f"coupling graph has {cp.n} qubits, matrix has {n}")
        return cp
    if cp is not None and not cp.is_complete():
        raise ValueError(f"variant {variant} is unrestricted; pass no coupling graph or a complete one")
    return complete(n)


def _initial_and_goal(pool: VarPool, m: ParityMatrix, k: int, weak: bool) -> list[list[int]]:
    n = m.n
    clauses: list[list[int]] = []
    for r in range(n):
        clauses += exactly_one([pool.var(("m", 0, r, c)) for c in range(n)], pool)
    if weak:
        for c in range(n):
            clauses += exactly_one([pool.var(("m", 0, r, c)) for r in range(n)], pool)
    else:
        clauses += [[pool.var(("m", 0, q, q))] for q in range(n)]
    for r in range(n):
        for c in range(n):
            v = pool.var(("m", k, r, c))
            clauses.append([v] if m.bit(r, c) else [-v])
    return clauses


def _forbidden_after_permutation(pool: VarPool, n: int, cp: CouplingGraph, step_lits) -> list[list[int]]:
    """Block column pair (p, q) when the logical pair placed there is not coupled.

    ``step_lits(p, q)`` returns the literals whose conjunction selects that
    column pair at the current step.
    """
    clauses = []
    for i in range(n):
        for j in range(n):
            if i == j or (i, j) in cp.pairs:
                continue
            for p in range(n):
                for q in range(n):
                    if p == q:
                        continue
                    sel = step_lits(p, q)
                    if sel is None:
                        continue
                    clauses.append([-pool.var(("m", 0, i, p)), -pool.var(("m", 0, j, q))] + [-x for x in sel])
    return clauses


def encode_count(
    m: ParityMatrix, k: int, variant: str = "S", cp: CouplingGraph | None = None
) -> CnfInstance:
    """CNF satisfiable iff exactly ``k`` column additions reach ``m``."""
    variant = normalize_variant(variant)
    if k < 0:
        raise ValueError("k must be non-negative")
    n = m.n
    graph = resolve_coupling(variant, n, cp)
    weak = is_weak(variant)
    pool = VarPool()
    for t in range(k + 1):
        for r in range(n):
            for c in range(n):
                pool.var(("m", t, r, c))
    for t in range(k):
        for q in range(n):
            pool.var(("ctrl", t, q))
        for q in range(n):
            pool.var(("tgt", t, q))

    clauses = _initial_and_goal(pool, m, k, weak)
    if variant == "W+R":
        trans_pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    else:
        trans_pairs = sorted(graph.pairs)

    for t in range(k):
        ctrl = [pool[("ctrl", t, q)] for q in range(n)]
        tgt = [pool[("tgt", t, q)] for q in range(n)]
        clauses += exactly_one(ctrl, pool)
        clauses += exactly_one(tgt, pool)
        clauses += [[-ctrl[q], -tgt[q]] for q in range(n)]
        if variant == "S+R":
            clauses += [
                [-ctrl[i], -tgt[j]]
                for i in range(n)
                for j in range(n)
                if i != j and (i, j) not in graph.pairs
            ]
        elif variant == "W+R":
            clauses += _forbidden_after_permutation(pool, n, graph, lambda p, q: (ctrl[p], tgt[q]))
        for i, j in trans_pairs:
            for r in range(n):
                src = pool[("m", t, r, i)]
                cur = pool[("m", t, r, j)]
                nxt = pool[("m", t + 1, r, j)]
                clauses += differ(cur, nxt, (ctrl[i], tgt[j], src))
                clauses += equal(cur, nxt, (ctrl[i], tgt[j], -src))
        for i in range(n):
            for r in range(n):
                clauses += equal(pool[("m", t, r, i)], pool[("m", t + 1, r, i)], (-tgt[i],))
    return CnfInstance(clauses, pool, k=k, variant=variant, metric="count", n=n)


def encode_depth(
    m: ParityMatrix,
    k: int,
    variant: str = "S",
    cp: CouplingGraph | None = None,
    *,
    at_least_one: bool = True,
) -> CnfInstance:
    """CNF satisfiable iff ``k`` layers of disjoint column additions reach ``m``."""
    variant = normalize_variant(variant)
    if k < 0:
        raise ValueError("k must be non-negative")
    n = m.n
    graph = resolve_coupling(variant, n, cp)
    weak = is_weak(variant)
    if variant == "W+R":
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    else:
        pairs = sorted(graph.pairs)
    pool = VarPool()
    for t in range(k + 1):
        for r in range(n):
            for c in range(n):
                pool.var(("m", t, r, c))
    for t in range(k):
        for i, j in pairs:
            pool.var(("cnot", t, i, j))
        for q in range(n):
            pool.var(("tgt", t, q))

    clauses = _initial_and_goal(pool, m, k, weak)
    for t in range(k):
        cn = {(i, j): pool[("cnot", t, i, j)] for i, j in pairs}
        tgt = [pool[("tgt", t, q)] for q in range(n)]
        if variant == "W+R":
            clauses += _forbidden_after_permutation(pool, n, graph, lambda p, q: (cn[(p, q)],))
        for q in range(n):
            clauses += at_most_one([v for (i, j), v in cn.items() if q in (i, j)], pool)
        if at_least_one and cn:
            clauses.append(list(cn.values()))
        for j in range(n):
            into = [v for (i, jj), v in cn.items() if jj == j]
            clauses += [[-v, tgt[j]] for v in into]
            clauses.append([-tgt[j]] + into)
        for (i, j), v in cn.items():
            for r in range(n):
                src = pool[("m", t, r, i)]
                cur = pool[("m", t, r, j)]
                nxt = pool[("m", t + 1, r, j)]
                clauses += differ(cur, nxt, (v, src))
                clauses += equal(cur, nxt, (v, -src))
        for i in range(n):
            for r in range(n):
                clauses += equal(pool[("m", t, r, i)], pool[("m", t + 1, r, i)], (-tgt[i],))
    inst = CnfInstance(clauses, pool, k=k, variant=variant, metric="depth", n=n)
    inst.meta["at_least_one"] = at_least_one
    return inst


def _input_permutation(model: dict[int, bool], pool: VarPool, n: int) -> Permutation:
    mapping = []
    for i in range(n):
        cols = [p for p in range(n) if model.get(pool[("m", 0, i, p)], False)]
        if len(cols) != 1:
            raise DecodeError(f"row {i} of the initial matrix is not one-hot: {cols}")
        mapping.append(cols[0])
    try:
        return Permutation(tuple(mapping))
    except ValueError as exc:
        raise DecodeError(str(exc)) from None


def decode(model: dict[int, bool], inst: CnfInstance) -> Plan:
    """Read the plan (and initial permutation for weak variants) out of a model."""
    n, pool = inst.n, inst.pool
    steps: list[frozenset[Pair]] = []
    for t in range(inst.k):
        if inst.metric == "count":
            cs = [q for q in range(n) if model.get(pool[("ctrl", t, q)], False)]
            ts = [q for q in range(n) if model.get(pool[("tgt", t, q)], False)]
            if len(cs) != 1 or len(ts) != 1:
                raise DecodeError(f"step {t}: expected one control and one target, got {cs} / {ts}")
            steps.append(frozenset([(cs[0], ts[0])]))
        else:
            chosen = [
                (i, j)
                for i in range(n)
                for j in range(n)
                if (v := pool.get(("cnot", t, i, j))) is not None and model.get(v, False)
            ]
            if not chosen and inst.meta.get("at_least_one", True):
                raise DecodeError(f"step {t}: no CNOT chosen")
            if chosen:
                steps.append(frozenset(chosen))
    perm = _input_permutation(model, pool, n) if is_weak(inst.variant) else None
    return Plan(tuple(steps), perm)


@dataclass
class Optimum:
    plan: Plan | None
    bound: int | None
    status: str  # optimal | timeout
    probes: list[tuple[int, str, float]] = field(default_factory=list)

    @property
    def gates(self) -> list[Pair]:
        return [] if self.plan is None else self.plan.circuit_gates()


def _shortest_path(cp: CouplingGraph, src: int, dst: int) -> list[int] | None:
    prev = {src: src}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for a, b in cp.pairs:
                if a == u and b not in prev:
                    prev[b] = u
                    nxt.append(b)
        frontier = nxt
    if dst not in prev:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def _routed_cnot(path: list[int]) -> list[Pair]:
    """Column addition ``path[0] -> path[-1]`` using only consecutive path pairs."""
    if len(path) == 2:
        return [(path[0], path[1])]
    head = _routed_cnot(path[:-1])
    last = (path[-2], path[-1])
    return head + [last] + head + [last]


def upper_bound_gates(m: ParityMatrix, variant: str, cp: CouplingGraph | None) -> list[Pair] | None:
    """A strong-equivalence plan usable by every variant; None if some gate cannot be routed."""
    gates = gauss_synth(m)
    if not is_restricted(variant):
        return gates
    out: list[Pair] = []
    for c, t in gates:
        path = _shortest_path(cp, c, t)
        if path is None:
            return None
        out += _routed_cnot(path)
    return out


def asap_layers(gates: list[Pair]) -> list[frozenset[Pair]]:
    """Layer a sequential gate list as-soon-as-possible (depth of the CNOT circuit)."""
    level: dict[int, int] = {}
    layers: list[set[Pair]] = []
    for c, t in gates:
        lv = max(level.get(c, 0), level.get(t, 0))
        if lv == len(layers):
            layers.append(set())
        layers[lv].add((c, t))
        level[c] = level[t] = lv + 1
    return [frozenset(l) for l in layers]


def find_optimum(
    m: ParityMatrix,
    variant: str = "S",
    metric: str = "count",
    cp: CouplingGraph | None = None,
    solver=None,
    budget: float | None = None,
    *,
    backend: str = "sat",
    qbf_solver=None,
    at_least_one: bool = True,
) -> Optimum:
    """Ramp k = 0, 1, 2, ...; the first satisfiable bound is the optimum.

    The search stops at the bound of a known constructive plan (Gaussian
    elimination, routed along shortest paths for restricted variants), which
    is then returned without a solver call once every smaller bound is
    refuted.
    """
    from .solvers import SolverHandle, solve_cnf

    variant = normalize_variant(variant)
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    n = m.n
    graph = resolve_coupling(variant, n, cp)
    if backend == "oracle":
        from .oracle import oracle_plan

        plan = oracle_plan(m, variant, metric, graph if is_restricted(variant) else None)
        bound = plan.cnot_count if metric == "count" else plan.depth
        return Optimum(plan, bound, "optimal")
    if backend == "qbf" and is_weak(variant):
        raise ValueError("the QBF backend supports S and S+R only")
    if backend not in ("sat", "qbf"):
        raise ValueError(f"unknown backend {backend!r}")

    solver = solver or SolverHandle("sat")
    deadline = None if budget is None else time.monotonic() + budget
    ub_gates = upper_bound_gates(m, variant, graph if is_restricted(variant) else None)
    if ub_gates is None:
        cap = None
    elif metric == "count":
        cap = len(ub_gates)
    else:
        cap = len(asap_layers(ub_gates))
    probes: list[tuple[int, str, float]] = []
    k = 0
    while True:
        if cap is not None and k == cap:
            if metric == "count":
                plan = Plan.from_gates(ub_gates, Permutation.identity(n) if is_weak(variant) else None)
            else:
                plan = Plan(tuple(asap_layers(ub_gates)), Permutation.identity(n) if is_weak(variant) else None)
            _verify(m, plan, variant, graph)
            probes.append((k, "upper-bound", 0.0))
            return Optimum(plan, k, "optimal", probes)
        remaining = None if deadline is None else deadline - time.monotonic()
        if remaining is not None and remaining <= 0:
            return Optimum(None, k, "timeout", probes)
        if backend == "qbf":
            status, plan, wall = _probe_qbf(m, k, variant, metric, graph, qbf_solver, solver, remaining)
        else:
            status, plan, wall = _probe_sat(m, k, variant, metric, graph, solver, remaining, at_least_one)
        probes.append((k, status, wall))
        log.debug("k=%d %s (%.3fs)", k, status, wall)
        if status == "timeout":
            return Optimum(None, k, "timeout", probes)
        if status == "sat":
            _verify(m, plan, variant, graph)
            return Optimum(plan, k, "optimal", probes)
        k += 1


def probe_bound(
    m: ParityMatrix,
    k: int,
    variant: str = "S",
    metric: str = "count",
    cp: CouplingGraph | None = None,
    solver=None,
    *,
    backend: str = "sat",
    qbf_solver=None,
) -> tuple[str, Plan | None]:
    """Decide a single bound ``k``; returns ``(sat|unsat|timeout, verified plan or None)``."""
    from .solvers import SolverHandle

    variant = normalize_variant(variant)
    graph = resolve_coupling(variant, m.n, cp)
    solver = solver or SolverHandle("sat")
    if backend == "qbf":
        if is_weak(variant):
            raise ValueError("the QBF backend supports S and S+R only")
        status, plan, _ = _probe_qbf(m, k, variant, metric, graph, qbf_solver, solver, None)
    elif backend == "sat":
        status, plan, _ = _probe_sat(m, k, variant, metric, graph, solver, None, True)
    else:
        raise ValueError(f"fixed-bound mode needs a sat or qbf backend, not {backend!r}")
    if plan is not None:
        _verify(m, plan, variant, graph)
    return status, plan


def _probe_sat(m, k, variant, metric, graph, solver, remaining, at_least_one):
    from .solvers import solve_cnf

    if metric == "count":
        inst = encode_count(m, k, variant, graph if is_restricted(variant) else None)
    else:
        inst = encode_depth(m, k, variant, graph if is_restricted(variant) else None, at_least_one=at_least_one)
    h = solver if remaining is None else solver.with_time_limit(min(solver.time_limit, remaining))
    res = solve_cnf(h, inst)
    plan = decode(res.model, inst) if res.status == "sat" else None
    return res.status, plan, res.wall_time


def _probe_qbf(m, k, variant, metric, graph, qbf_solver, sat_solver, remaining):
    from .qbf_encode import decode_outer, encode_qbf
    from .solvers import SolverHandle, solve_qbf

    q = encode_qbf(m, k, variant, metric, graph if is_restricted(variant) else None)
    h = qbf_solver or SolverHandle("qbf")
    if remaining is not None:
        h = h.with_time_limit(min(h.time_limit, remaining))
    res = solve_qbf(h, q)
    if res.status == "timeout":
        return "timeout", None, res.wall_time
    if res.status == "false":
        return "unsat", None, res.wall_time
    if res.model is not None:
        return "sat", decode_outer(res.model, q), res.wall_time
    # No certificate from the QBF solver: extract a plan at the proven bound via SAT.
    status, plan, wall = _probe_sat(m, k, variant, metric, graph, sat_solver, remaining, True)
    if status != "sat":
        raise DecodeError(f"QBF solver reported true at k={k} but the SAT encoding says {status}")
    return "sat", plan, res.wall_time + wall


def _verify(m: ParityMatrix, plan: Plan, variant: str, graph: CouplingGraph) -> None:
    res = check_plan(m, plan, graph if is_restricted(variant) else None, weak=is_weak(variant))
    if not res.ok:
        raise DecodeError("decoded plan failed verification: " + "; ".join(res.problems))


__all__ = [
    "VARIANTS",
    "METRICS",
    "DecodeError",
    "Optimum",
    "asap_layers",
    "decode",
    "encode_count",
    "encode_depth",
    "find_optimum",
    "normalize_variant",
    "probe_bound",
]
