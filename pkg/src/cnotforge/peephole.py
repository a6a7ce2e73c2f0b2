"""Slice-and-replace peephole optimization of arbitrary circuits."""

from __future__ import annotations

import logging
import resource
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .circuit import Circuit, Metrics, Slice, cx, metrics, slice_circuit, stitch
from .coupling import CouplingGraph
from .gf2 import Pair, Permutation, from_gate_list, weak_match
from .sat_encode import asap_layers, find_optimum, normalize_variant
from .solvers import SolverHandle

log = logging.getLogger(__name__)

DEFAULT_SLICE_BUDGET = 600.0


class PeepholeError(ValueError):
    pass


@dataclass
class SliceRecord:
    index: int
    n_cnots_before: int
    n_cnots_after: int
    bound: int | None
    status: str  # optimal | timeout | kept | empty
    wall_time_s: float
    depth_before: int = 0
    depth_after: int = 0


@dataclass
class PeepholeResult:
    circuit: Circuit
    output_perm: Permutation
    records: list[SliceRecord]
    before: Metrics
    after: Metrics
    slices: list[Slice] = field(repr=False, default_factory=list)

    def report(self) -> dict:
        return {
            "before": self.before.as_dict(),
            "after": self.after.as_dict(),
            "output_permutation": list(self.output_perm.mapping),
            "all_slices_optimal": all(r.status in ("optimal", "empty", "kept") for r in self.records),
            "peak_rss_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
            "slices": [asdict(r) for r in self.records],
        }


def _cnot_depth(pairs) -> int:
    return len(asap_layers(list(pairs)))


def _solve_slice(args):
    index, n, pairs, variant, metric, cp, budget, backend, solver, qbf_solver = args
    start = time.monotonic()
    before = len(pairs)
    d_before = _cnot_depth(pairs)
    if not pairs:
        rec = SliceRecord(index, 0, 0, 0, "empty", 0.0)
        return rec, [], Permutation.identity(n)
    target = from_gate_list(n, pairs)
    opt = find_optimum(
        target, variant, metric, cp, solver, budget, backend=backend, qbf_solver=qbf_solver
    )
    wall = time.monotonic() - start
    if opt.status != "optimal":
        rec = SliceRecord(index, before, before, opt.bound, "timeout", wall, d_before, d_before)
        return rec, list(pairs), Permutation.identity(n)
    gates = opt.plan.circuit_gates()
    perm = opt.plan.output_permutation(n)
    d_after = _cnot_depth(gates)
    compliant = cp is None or all(p in cp.pairs for p in pairs)
    keep = False
    if compliant:
        if metric == "count":
            keep = len(gates) > before
        else:
            keep = (d_after, len(gates)) >= (d_before, before)
    if keep:
        rec = SliceRecord(index, before, before, opt.bound, "kept", wall, d_before, d_before)
        return rec, list(pairs), Permutation.identity(n)
    rec = SliceRecord(index, before, len(gates), opt.bound, "optimal", wall, d_before, d_after)
    return rec, gates, perm


def optimize(
    c: Circuit,
    variant: str = "S",
    metric: str = "count",
    cp: CouplingGraph | None = None,
    per_slice_budget: float = DEFAULT_SLICE_BUDGET,
    backend: str = "sat",
    *,
    solver: SolverHandle | None = None,
    qbf_solver: SolverHandle | None = None,
    jobs: int = 1,
    reverse: bool = False,
) -> PeepholeResult:
    """Resynthesize every CNOT block of ``c`` and stitch the circuit back together.

    Timed-out slices are kept verbatim. For W the per-slice output
    permutations relabel all later gates and compose into ``output_perm``.
    """
    variant = normalize_variant(variant)
    if variant == "W+R":
        raise PeepholeError(
            "W+R is not available for peephole optimization: a permutation chosen in one slice "
            "can break coupling restrictions in later slices, so slice order would matter"
        )
    if variant == "S+R" and cp is None:
        raise PeepholeError("S+R needs a coupling graph")
    if variant != "S+R" and cp is not None and not cp.is_complete():
        raise PeepholeError(f"variant {variant} is unrestricted; drop the coupling graph or use S+R")
    if backend == "qbf" and variant == "W":
        raise PeepholeError("the QBF backend supports S and S+R only")
    if cp is not None and cp.n != c.n:
        raise PeepholeError(f"coupling graph has {cp.n} qubits, circuit has {c.n}")
    solver = solver or SolverHandle("sat", None, per_slice_budget)
    rcp = cp if variant == "S+R" else None

    slices = slice_circuit(c)
    tasks = [
        (i, c.n, sl.pairs(), variant, metric, rcp, per_slice_budget, backend, solver, qbf_solver)
        for i, sl in enumerate(slices)
    ]
    order = list(reversed(tasks)) if reverse else tasks
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_solve_slice, order))
    else:
        results = [_solve_slice(t) for t in order]
    if reverse:
        results.reverse()

    records = [r for r, _, _ in results]
    replacements = [(gates, perm) for _, gates, perm in results]
    out, perm = stitch(slices, replacements, c)
    for r in records:
        log.info("slice %d: %d -> %d CNOTs (%s, %.2fs)", r.index, r.n_cnots_before, r.n_cnots_after, r.status, r.wall_time_s)
    res = PeepholeResult(out, perm, records, metrics(c), metrics(out), slices)
    if not verify(c, out, perm):
        raise PeepholeError("optimized circuit failed verification against the input")
    return res


def _per_qubit_sequences(gates) -> dict[int, list]:
    seqs: dict[int, list] = {}
    for g in gates:
        for q in g.qubits:
            seqs.setdefault(q, []).append((g.name, g.qubits, g.params, g.clbits))
    return seqs


def verify(original: Circuit, result: Circuit, output_perm: Permutation) -> bool:
    """Check ``result`` against ``original`` slice by slice.

    The original is sliced; the result is consumed as alternating CNOT runs
    and tails. Each CNOT run, mapped back to the slice's own wire labels, must
    equal the original block up to a column permutation, the tails must match
    after relabeling (per-qubit order, so commuting gates may move), and the
    composed permutation must equal ``output_perm``.
    """
    if original.n != result.n or output_perm.n != original.n:
        return False
    n = original.n
    gates = result.gates
    pos = 0
    acc = Permutation.identity(n)
    for sl in slice_circuit(original):
        run: list[Pair] = []
        while pos < len(gates) and gates[pos].is_cnot:
            run.append(gates[pos].qubits)  # type: ignore[arg-type]
            pos += 1
        inv = acc.inverse()
        local = [(inv(a), inv(b)) for a, b in run]
        p = weak_match(from_gate_list(n, sl.pairs()), from_gate_list(n, local))
        if p is None:
            return False
        acc = acc.compose(p)
        expected = [g.relabel(acc) for g in sl.tail]
        got = gates[pos:pos + len(expected)]
        if len(got) != len(expected) or any(g.is_cnot for g in got):
            return False
        if _per_qubit_sequences(got) != _per_qubit_sequences(expected):
            return False
        pos += len(expected)
    if pos != len(gates):
        # Trailing CNOTs must then form an identity block.
        rest = [g.qubits for g in gates[pos:]]
        if any(not g.is_cnot for g in gates[pos:]) or from_gate_list(n, rest) != from_gate_list(n, []):
            return False
    return acc == output_perm


def coupling_violations(c: Circuit, cp: CouplingGraph) -> list[tuple[int, Pair]]:
    return [(i, g.qubits) for i, g in enumerate(c.gates) if g.is_cnot and g.qubits not in cp.pairs]


__all__ = ["PeepholeError", "PeepholeResult", "SliceRecord", "coupling_violations", "optimize", "verify", "cx"]
