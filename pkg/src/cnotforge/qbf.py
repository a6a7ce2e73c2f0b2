"""Prenex QBF containers, QDIMACS text I/O and universal expansion."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cnf import Clause, VarPool, symbol_text

Block = tuple[str, list[int]]  # ("e" | "a", variables)


@dataclass
class QbfInstance:
    prefix: list[Block]
    clauses: list[Clause]
    pool: VarPool
    k: int = 0
    variant: str = "S"
    metric: str = "count"
    n: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def var_count(self) -> int:
        return self.pool.top

    @property
    def varmap(self):
        return self.pool.by_symbol

    def outer_vars(self) -> list[int]:
        """Variables of the leading existential block."""
        if self.prefix and self.prefix[0][0] == "e":
            return list(self.prefix[0][1])
        return []

    def to_qdimacs(self, with_varmap: bool = True) -> str:
        return to_qdimacs(self.var_count, self.prefix, self.clauses, self.pool if with_varmap else None)


def merge_blocks(prefix: list[Block]) -> list[Block]:
    out: list[Block] = []
    for q, vs in prefix:
        if not vs:
            continue
        if out and out[-1][0] == q:
            out[-1] = (q, out[-1][1] + list(vs))
        else:
            out.append((q, list(vs)))
    return out


def to_qdimacs(var_count: int, prefix: list[Block], clauses, pool: VarPool | None = None) -> str:
    clauses = list(clauses)
    out = []
    if pool is not None:
        for vid in range(1, pool.top + 1):
            out.append(f"c var {vid} = {symbol_text(pool.by_id[vid])}")
    out.append(f"p cnf {var_count} {len(clauses)}")
    for q, vs in merge_blocks(prefix):
        out.append(f"{q} " + " ".join(map(str, vs)) + " 0")
    out.extend(" ".join(map(str, cl)) + " 0" for cl in clauses)
    return "\n".join(out) + "\n"


def parse_qdimacs(text: str) -> tuple[int, list[Block], list[Clause]]:
    var_count = 0
    prefix: list[Block] = []
    clauses: list[Clause] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            var_count = int(parts[2])
        elif parts[0] in ("e", "a"):
            if parts[-1] != "0":
                raise ValueError(f"unterminated quantifier line: {raw!r}")
            prefix.append((parts[0], [int(x) for x in parts[1:-1]]))
        else:
            lits = [int(x) for x in parts]
            if lits[-1] != 0:
                raise ValueError(f"unterminated clause: {raw!r}")
            clauses.append(lits[:-1])
    return var_count, merge_blocks(prefix), clauses


def expand(var_count: int, prefix: list[Block], clauses: list[Clause], max_universals: int = 12):
    """Eliminate all universal blocks by expansion, innermost first.

    Returns ``(var_count, clauses)`` of an equisatisfiable CNF in which the
    variables of the outermost existential block keep their ids, so a model
    restricted to them is a winning outer assignment.
    """
    prefix = merge_blocks(prefix)
    quantified = {v for _, vs in prefix for v in vs}
    free = [v for v in range(1, var_count + 1) if v not in quantified]
    if free:
        prefix = merge_blocks([("e", free)] + prefix)
    n_univ = sum(len(vs) for q, vs in prefix if q == "a")
    if n_univ > max_universals:
        raise ValueError(f"expansion budget exceeded: {n_univ} universal variables")
    top = var_count
    while any(q == "a" for q, _ in prefix):
        ai = max(i for i, (q, _) in enumerate(prefix) if q == "a")
        univ = prefix[ai][1]
        inner = [v for _, vs in prefix[ai + 1:] for v in vs]
        new_inner: list[int] = []
        new_clauses: list[Clause] = []
        for bits in itertools.product((False, True), repeat=len(univ)):
            fixed = dict(zip(univ, bits))
            rename = {}
            for v in inner:
                top += 1
                rename[v] = top
                new_inner.append(top)
            for cl in clauses:
                out = []
                sat = False
                for l in cl:
                    v = abs(l)
                    if v in fixed:
                        if fixed[v] == (l > 0):
                            sat = True
                            break
                        continue
                    w = rename.get(v, v)
                    out.append(w if l > 0 else -w)
                if not sat:
                    new_clauses.append(out)
        clauses = new_clauses
        prefix = merge_blocks(prefix[:ai] + [("e", new_inner)])
    return top, clauses
