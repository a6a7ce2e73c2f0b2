"""Synthesized CNOT plans and their replay against a target parity matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

from .coupling import CouplingGraph
from .gf2 import Pair, ParityMatrix, Permutation, fold_columns, identity, permutation_matrix


@dataclass(frozen=True)
class Plan:
    """A sequence of steps of column additions, optionally from a permuted identity.

    ``input_perm`` maps logical qubit ``i`` to the column ``p`` that holds
    ``e_i`` at time 0. Step pairs are column indices.
    """

    steps: tuple[frozenset[Pair], ...] = ()
    input_perm: Permutation | None = None

    @classmethod
    def from_gates(cls, gates, input_perm: Permutation | None = None) -> Plan:
        return cls(tuple(frozenset([g]) for g in gates), input_perm)

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def cnot_count(self) -> int:
        return sum(len(s) for s in self.steps)

    def column_gates(self) -> list[Pair]:
        """Flattened column-index gate list; pairs within a step are sorted for determinism."""
        return [g for step in self.steps for g in sorted(step)]

    def circuit_gates(self) -> list[Pair]:
        """Gates on physical wires after absorbing the input permutation.

        Column ``p`` initially carries logical input ``input_perm⁻¹(p)``, so
        every gate is relabeled through the inverse permutation.
        """
        if self.input_perm is None:
            return self.column_gates()
        inv = self.input_perm.inverse()
        return [(inv(c), inv(t)) for c, t in self.column_gates()]

    def output_permutation(self, n: int) -> Permutation:
        """Where each logical output ends up on the wires of ``circuit_gates``."""
        if self.input_perm is None:
            return Permutation.identity(n)
        return self.input_perm.inverse()

    def replay(self, n: int) -> ParityMatrix:
        start = identity(n) if self.input_perm is None else permutation_matrix(self.input_perm)
        return ParityMatrix(tuple(fold_columns(start.cols, self.column_gates())))


@dataclass
class PlanCheck:
    ok: bool
    problems: list[str] = field(default_factory=list)


def check_plan(
    target: ParityMatrix,
    plan: Plan,
    cp: CouplingGraph | None = None,
    *,
    weak: bool = False,
) -> PlanCheck:
    """Replay a plan and check it against the target and the restriction set."""
    n = target.n
    problems: list[str] = []
    if plan.input_perm is not None and not weak:
        problems.append("strong variant plan carries an input permutation")
    for t, step in enumerate(plan.steps):
        if not step:
            problems.append(f"step {t} is empty")
        used: set[int] = set()
        for c, g in step:
            if c in used or g in used:
                problems.append(f"step {t} reuses a qubit")
            used.update((c, g))
    if cp is not None:
        for c, t in plan.circuit_gates():
            if (c, t) not in cp.pairs:
                problems.append(f"gate ({c}, {t}) not permitted by coupling graph")
    try:
        got = plan.replay(n)
    except ValueError as exc:
        problems.append(str(exc))
    else:
        if got != target:
            problems.append("replay does not reproduce the target matrix")
    return PlanCheck(not problems, problems)
