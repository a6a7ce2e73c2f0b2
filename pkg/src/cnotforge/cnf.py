"""CNF containers, cardinality constraints and DIMACS text I/O."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Clause = list[int]
Symbol = tuple  # e.g. ("m", t, r, c) or ("aux", "eo", 17)

# Constraint groups up to this size use the pairwise AMO; larger ones a ladder.
PAIRWISE_LIMIT = 6


class VarPool:
    """Allocates DIMACS variable ids and remembers which symbol each stands for."""

    def __init__(self) -> None:
        self.by_symbol: dict[Symbol, int] = {}
        self.by_id: dict[int, Symbol] = {}
        self.top = 0
        self._aux = 0

    def var(self, symbol: Symbol) -> int:
        vid = self.by_symbol.get(symbol)
        if vid is None:
            self.top += 1
            vid = self.top
            self.by_symbol[symbol] = vid
            self.by_id[vid] = symbol
        return vid

    def aux(self, kind: str) -> int:
        self._aux += 1
        return self.var(("aux", kind, self._aux))

    def __getitem__(self, symbol: Symbol) -> int:
        return self.by_symbol[symbol]

    def get(self, symbol: Symbol) -> int | None:
        return self.by_symbol.get(symbol)


def at_most_one(lits: Sequence[int], pool: VarPool) -> list[Clause]:
    lits = list(lits)
    if len(lits) <= 1:
        return []
    if len(lits) <= PAIRWISE_LIMIT:
        return [[-a, -b] for a, b in itertools.combinations(lits, 2)]
    # Sequential (ladder) encoding: s_i means "some of lits[0..i] is true".
    clauses: list[Clause] = []
    s = [pool.aux("amo") for _ in range(len(lits) - 1)]
    clauses.append([-lits[0], s[0]])
    for i in range(1, len(lits) - 1):
        clauses.append([-lits[i], s[i]])
        clauses.append([-s[i - 1], s[i]])
        clauses.append([-lits[i], -s[i - 1]])
    clauses.append([-lits[-1], -s[-1]])
    return clauses


def exactly_one(lits: Sequence[int], pool: VarPool) -> list[Clause]:
    return [list(lits)] + at_most_one(lits, pool)


def equal(a: int, b: int, guard: Sequence[int] = ()) -> list[Clause]:
    """``guard → (a = b)``; guard literals are the antecedent conjuncts."""
    neg = [-g for g in guard]
    return [neg + [-a, b], neg + [a, -b]]


def differ(a: int, b: int, guard: Sequence[int] = ()) -> list[Clause]:
    """``guard → (a ≠ b)``."""
    neg = [-g for g in guard]
    return [neg + [a, b], neg + [-a, -b]]


@dataclass
class CnfInstance:
    """A CNF formula plus the symbol map used to decode solver models."""

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
    def varmap(self) -> dict[Symbol, int]:
        return self.pool.by_symbol

    def to_dimacs(self, with_varmap: bool = True) -> str:
        return to_dimacs(self.var_count, self.clauses, self.pool if with_varmap else None)


def symbol_text(sym: Symbol) -> str:
    head, *idx = sym
    if head == "aux":
        return f"aux_{idx[0]}_{idx[1]}"
    return head + "".join(f"[{i}]" for i in idx)


def to_dimacs(var_count: int, clauses: Iterable[Sequence[int]], pool: VarPool | None = None) -> str:
    clauses = list(clauses)
    out = []
    if pool is not None:
        for vid in range(1, pool.top + 1):
            out.append(f"c var {vid} = {symbol_text(pool.by_id[vid])}")
    out.append(f"p cnf {var_count} {len(clauses)}")
    out.extend(" ".join(map(str, cl)) + " 0" for cl in clauses)
    return "\n".join(out) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[Clause]]:
    var_count = 0
    clauses: list[Clause] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {raw!r}")
            var_count = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    return var_count, clauses


def check_model(clauses: Iterable[Sequence[int]], model: dict[int, bool]) -> int | None:
    """Return the index of the first falsified clause, or None if all are satisfied."""
    for i, cl in enumerate(clauses):
        if not any(model.get(abs(l), False) == (l > 0) for l in cl):
            return i
    return None
