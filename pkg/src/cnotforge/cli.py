"""``cnotforge`` command line: synth, peephole, encode, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 solver error, 4 timeout without a result.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .circuit import (
    Circuit,
    QasmError,
    absorb_trailing_swaps,
    emit_qasm,
    parse_output_permutation,
    parse_qasm,
    swaps_for,
)
from .coupling import CouplingError, CouplingGraph, complete, line, parse_coupling
from .gf2 import ParityMatrix, Permutation, parse_matrix_text
from .oracle import OracleError
from .peephole import PeepholeError, coupling_violations, optimize, verify
from .plan import Plan
from .sat_encode import (
    DecodeError,
    encode_count,
    encode_depth,
    find_optimum,
    is_restricted,
    is_weak,
    normalize_variant,
    probe_bound,
)
from .solvers import SolverError, discover

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER, EXIT_TIMEOUT = 0, 1, 2, 3, 4

log = logging.getLogger("cnotforge")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_input(path: str) -> tuple[ParityMatrix, Circuit | None]:
    text = _read(path)
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if first.startswith("n "):
        return parse_matrix_text(text), None
    c = parse_qasm(text)
    if not c.is_cnot_only():
        raise UsageError("synth needs a CNOT-only circuit; use 'peephole' for circuits with other gates")
    return c.parity_matrix(), c


def _coupling(args, n: int) -> CouplingGraph | None:
    if args.coupling:
        cp = parse_coupling(_read(args.coupling))
    elif args.line:
        cp = line(args.line)
    elif args.complete:
        cp = complete(args.complete)
    else:
        return None
    if cp.n != n:
        raise UsageError(f"coupling graph has {cp.n} qubits, input has {n}")
    return cp


def _variant_coupling(args, n: int) -> tuple[str, CouplingGraph | None]:
    variant = normalize_variant(args.variant)
    cp = _coupling(args, n)
    if is_restricted(variant) and cp is None:
        raise UsageError(f"variant {variant} needs --coupling, --line or --complete")
    if not is_restricted(variant) and cp is not None and not cp.is_complete():
        raise UsageError(f"variant {variant} ignores restrictions; drop the coupling flag or use sr/wr")
    return variant, (cp if is_restricted(variant) else None)


def _handles(args):
    sat = discover("sat", args.sat_solver, args.timeout)
    qbf = discover("qbf", args.qbf_solver, args.timeout)
    return sat, qbf


def _write_circuit(args, c: Circuit, perm: Permutation | None) -> None:
    if perm is not None and args.emit_swaps:
        c = c.with_gates(c.gates + swaps_for(perm))
        perm = None
    text = emit_qasm(c, perm)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_synth(args) -> int:
    m, circ = _load_input(args.input)
    variant, cp = _variant_coupling(args, m.n)
    sat, qbf = _handles(args)
    if args.k is not None:
        if args.k < 0:
            raise UsageError("--k must be non-negative")
        status, plan = probe_bound(m, args.k, variant, args.metric, cp, sat, backend=args.backend, qbf_solver=qbf)
        if status == "timeout":
            print(f"k={args.k}: timeout", file=sys.stderr)
            return EXIT_TIMEOUT
        print(f"k={args.k}: {'satisfiable' if status == 'sat' else 'unsatisfiable'}")
        if plan is None:
            return EXIT_OK
    else:
        opt = find_optimum(m, variant, args.metric, cp, sat, args.timeout, backend=args.backend, qbf_solver=qbf)
        if opt.status != "optimal":
            print(f"timeout: no plan found; bounds below {opt.bound} refuted", file=sys.stderr)
            return EXIT_TIMEOUT
        plan = opt.plan
        print(f"optimal CNOT {args.metric}: {opt.bound}")
    assert plan is not None
    base = circ if circ is not None else Circuit(m.n)
    out = Circuit.from_pairs(m.n, plan.circuit_gates(), qregs=list(base.qregs), cregs=list(base.cregs))
    perm = plan.output_permutation(m.n) if is_weak(variant) else None
    if perm is not None:
        print(f"output permutation: {perm}")
    _write_circuit(args, out, perm)
    if args.report:
        Path(args.report).write_text(json.dumps(_plan_report(plan, m.n, variant, args.metric), indent=2) + "\n")
    return EXIT_OK


def _plan_report(plan: Plan, n: int, variant: str, metric: str) -> dict:
    return {
        "variant": variant,
        "metric": metric,
        "cnot_count": plan.cnot_count,
        "cnot_depth": plan.depth,
        "gates": [list(g) for g in plan.circuit_gates()],
        "output_permutation": list(plan.output_permutation(n).mapping) if plan.input_perm else None,
    }


def cmd_peephole(args) -> int:
    c = parse_qasm(_read(args.input))
    variant, cp = _variant_coupling(args, c.n)
    sat, qbf = _handles(args)
    res = optimize(
        c, variant, args.metric, cp, args.timeout, args.backend,
        solver=sat, qbf_solver=qbf, jobs=args.jobs,
    )
    b, a = res.before, res.after
    print(f"{'metric':<12}{'before':>8}{'after':>8}")
    for key in ("cnot_count", "depth", "cnot_depth"):
        print(f"{key:<12}{getattr(b, key):>8}{getattr(a, key):>8}")
    timeouts = sum(r.status == "timeout" for r in res.records)
    print(f"slices: {len(res.records)}, timed out: {timeouts}")
    perm = None if res.output_perm.is_identity() and not is_weak(variant) else res.output_perm
    _write_circuit(args, res.circuit, perm)
    if args.report:
        Path(args.report).write_text(json.dumps(res.report(), indent=2) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    from .pddl import emit_domain, emit_problem
    from .qbf_encode import encode_qbf

    m, _ = _load_input(args.input)
    variant, cp = _variant_coupling(args, m.n)
    if args.format == "pddl":
        if is_weak(variant):
            raise UsageError("no planning encoding for weak variants; use s or sr")
        if not args.output:
            raise UsageError("--format pddl needs --output <directory>")
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "domain.pddl").write_text(emit_domain(variant))
        (out / "problem.pddl").write_text(emit_problem(m, cp))
        print(f"wrote {out / 'domain.pddl'} and {out / 'problem.pddl'}")
        return EXIT_OK
    if args.k is None:
        raise UsageError(f"--format {args.format} needs --k")
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    if args.format == "qdimacs":
        if is_weak(variant):
            raise UsageError("QBF encoding covers s and sr only")
        text = encode_qbf(m, args.k, variant, args.metric, cp).to_qdimacs()
    else:
        enc = encode_count if args.metric == "count" else encode_depth
        text = enc(m, args.k, variant, cp).to_dimacs()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    original = parse_qasm(_read(args.original))
    text = _read(args.optimized)
    result = parse_qasm(text)
    perm = parse_output_permutation(text)
    if perm is None:
        result, perm = absorb_trailing_swaps(result)
    if result.n != original.n or perm.n != original.n:
        print("not equivalent: qubit counts differ")
        return EXIT_VERIFY
    cp = _coupling(args, original.n)
    ok = verify(original, result, perm)
    kind = "strong" if perm.is_identity() else "weak"
    if not ok:
        print("not equivalent")
        return EXIT_VERIFY
    if cp is not None:
        bad = coupling_violations(result, cp)
        if bad:
            i, pair = bad[0]
            print(f"equivalent ({kind}) but gate {i} cx{pair} violates the coupling graph")
            return EXIT_VERIFY
    print(f"equivalent ({kind})")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, *, with_k: bool) -> None:
    p.add_argument("--input", required=True, help="OpenQASM 2.0 circuit or matrix file")
    p.add_argument("--variant", default="s", help="s | w | sr | wr")
    p.add_argument("--metric", default="count", choices=["count", "depth"])
    _add_coupling(p)
    p.add_argument("--backend", default="sat", choices=["sat", "qbf", "oracle"])
    if with_k:
        p.add_argument("--k", type=int, help="decide this single bound instead of searching")
    p.add_argument("--timeout", type=float, default=600.0, help="seconds (per slice for peephole)")
    p.add_argument("--emit-swaps", action="store_true", help="append swap gates instead of a permutation comment")
    p.add_argument("--output", help="output path (stdout when omitted)")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--sat-solver", help="external SAT solver command")
    p.add_argument("--qbf-solver", help="external QBF solver command")


def _add_coupling(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--coupling", help="coupling graph file")
    g.add_argument("--line", type=int, metavar="N", help="line coupling on N qubits")
    g.add_argument("--complete", type=int, metavar="N", help="all-to-all coupling on N qubits")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cnotforge", description="Optimal CNOT resynthesis")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="optimally resynthesize one CNOT circuit or matrix")
    _add_common(p, with_k=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("peephole", help="optimize every CNOT slice of a circuit")
    _add_common(p, with_k=False)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_peephole)

    p = sub.add_parser("encode", help="write DIMACS, QDIMACS or PDDL without solving")
    _add_common(p, with_k=True)
    p.add_argument("--format", required=True, choices=["dimacs", "qdimacs", "pddl"])
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("verify", help="check an optimized circuit against its original")
    p.add_argument("--original", required=True)
    p.add_argument("--optimized", required=True)
    _add_coupling(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "backend", None) == "oracle" and getattr(args, "k", None) is not None:
        print("error: --k is not available with the oracle backend", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, QasmError, CouplingError, PeepholeError, OracleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, DecodeError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
