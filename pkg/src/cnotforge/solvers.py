"""Uniform contract for external SAT/QBF solver processes plus the builtin fallback.

External solvers follow the SAT-competition conventions: exit code 10 for
satisfiable/true, 20 for unsatisfiable/false, ``s`` status lines and ``v``
(or QDIMACS ``V``) value lines. Every returned model is checked against the
clauses before it is handed to a decoder.
"""

from __future__ import annotations

import logging
import os
import shlex
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field

from . import cdcl
from .cnf import CnfInstance, check_model, parse_dimacs, to_dimacs
from .qbf import QbfInstance, expand, parse_qdimacs, to_qdimacs

log = logging.getLogger(__name__)

SAT_ENV = "CNOTFORGE_SAT_CMD"
QBF_ENV = "CNOTFORGE_QBF_CMD"
BUILTIN_MAX_VARS = 20000


class SolverError(RuntimeError):
    """The solver violated the I/O contract or returned a bad certificate."""


@dataclass(frozen=True)
class SolverHandle:
    """Immutable description of how to run a solver.

    ``command`` is None for the builtin path. Otherwise it is an argument
    list; ``{input}`` is replaced by the instance path, or the path is
    appended when no placeholder is present.
    """

    kind: str = "sat"
    command: tuple[str, ...] | None = None
    time_limit: float = 600.0
    mem_note: str = "8GB"
    max_builtin_vars: int = BUILTIN_MAX_VARS

    def __post_init__(self) -> None:
        if self.kind not in ("sat", "qbf"):
            raise ValueError(f"unknown solver kind {self.kind!r}")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.command is not None:
            exe = self.command[0]
            if shutil.which(exe) is None and not os.path.isfile(exe):
                raise ValueError(f"solver executable not found: {exe}")

    @property
    def builtin(self) -> bool:
        return self.command is None

    def with_time_limit(self, seconds: float) -> SolverHandle:
        return SolverHandle(self.kind, self.command, max(seconds, 1e-3), self.mem_note, self.max_builtin_vars)

    def describe(self) -> str:
        return "builtin" if self.command is None else " ".join(self.command)


def discover(kind: str = "sat", flag: str | None = None, time_limit: float = 600.0) -> SolverHandle:
    """Explicit command, then the environment variable, then the builtin path."""
    cmd = flag or os.environ.get(SAT_ENV if kind == "sat" else QBF_ENV)
    if cmd:
        return SolverHandle(kind, tuple(shlex.split(cmd)), time_limit)
    return SolverHandle(kind, None, time_limit)


@dataclass
class SolveResult:
    status: str  # sat | unsat | timeout  (QBF: true | false | timeout)
    model: dict[int, bool] | None = None
    wall_time: float = 0.0
    stderr: str = field(default="", repr=False)


def _run(h: SolverHandle, text: str, suffix: str) -> tuple[int | None, str, str, float]:
    with tempfile.NamedTemporaryFile("w", suffix=suffix, delete=False) as f:
        f.write(text)
        path = f.name
    argv = [a.replace("{input}", path) for a in h.command]
    if not any("{input}" in a for a in h.command):
        argv.append(path)
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True, start_new_session=True
        )
        try:
            out, err = proc.communicate(timeout=h.time_limit)
            code: int | None = proc.returncode
        except subprocess.TimeoutExpired:
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except ProcessLookupError:
                pass
            out, err = proc.communicate()
            code = None
    finally:
        os.unlink(path)
    return code, out, err, time.monotonic() - start


def _parse_values(out: str, upper_too: bool) -> dict[int, bool]:
    model: dict[int, bool] = {}
    for line in out.splitlines():
        parts = line.split()
        if not parts or parts[0] not in (("v", "V") if upper_too else ("v",)):
            continue
        for tok in parts[1:]:
            lit = int(tok)
            if lit:
                model[abs(lit)] = lit > 0
    return model


def _status_line(out: str) -> str | None:
    for line in out.splitlines():
        if line.startswith("s "):
            return line[2:].strip().upper()
    return None


def solve_clauses(h: SolverHandle, var_count: int, clauses, *, dimacs: str | None = None) -> SolveResult:
    if h.kind != "sat":
        raise ValueError("solve_cnf needs a sat handle")
    if h.builtin:
        if var_count > h.max_builtin_vars:
            raise SolverError(
                f"builtin solver guard exceeded: {var_count} variables > {h.max_builtin_vars}; "
                f"configure an external solver via --sat-solver or {SAT_ENV}"
            )
        start = time.monotonic()
        res, model = cdcl.fast_solve(var_count, clauses, start + h.time_limit)
        wall = time.monotonic() - start
        if res is None:
            return SolveResult("timeout", None, wall)
        if res:
            _require_model(clauses, model)
            return SolveResult("sat", model, wall)
        return SolveResult("unsat", None, wall)

    text = dimacs if dimacs is not None else to_dimacs(var_count, clauses)
    code, out, err, wall = _run(h, text, ".cnf")
    if code is None:
        return SolveResult("timeout", None, wall, err)
    status = _status_line(out)
    if code == 10 or (code == 0 and status == "SATISFIABLE"):
        if status not in (None, "SATISFIABLE"):
            raise SolverError(f"exit code 10 but status line {status!r}; stderr: {err.strip()}")
        model = _parse_values(out, upper_too=False)
        full = {v: model.get(v, False) for v in range(1, var_count + 1)}
        _require_model(clauses, full)
        return SolveResult("sat", full, wall, err)
    if code == 20 or (code == 0 and status == "UNSATISFIABLE"):
        return SolveResult("unsat", None, wall, err)
    raise SolverError(f"solver exited with code {code} (status {status!r}); stderr: {err.strip()}")


def _require_model(clauses, model) -> None:
    bad = check_model(clauses, model)
    if bad is not None:
        raise SolverError(f"model falsifies clause #{bad}: {list(clauses)[bad]}")


def solve_cnf(h: SolverHandle, inst: CnfInstance) -> SolveResult:
    return solve_clauses(h, inst.var_count, inst.clauses, dimacs=inst.to_dimacs())


def builtin_sat(inst: CnfInstance, max_vars: int = BUILTIN_MAX_VARS, time_limit: float = 600.0) -> SolveResult:
    return solve_cnf(SolverHandle("sat", None, time_limit, max_builtin_vars=max_vars), inst)


def solve_qbf(h: SolverHandle, inst: QbfInstance, sat: SolverHandle | None = None) -> SolveResult:
    """Solve a QBF; without an external command, expand universals and call SAT."""
    if h.kind != "qbf":
        raise ValueError("solve_qbf needs a qbf handle")
    if h.builtin:
        start = time.monotonic()
        top, clauses = expand(inst.var_count, inst.prefix, inst.clauses)
        sat = sat or SolverHandle("sat", None, h.time_limit, max_builtin_vars=max(BUILTIN_MAX_VARS, top))
        res = solve_clauses(sat.with_time_limit(h.time_limit), top, clauses)
        outer = None
        if res.model is not None:
            outer = {v: res.model.get(v, False) for v in inst.outer_vars()}
        status = {"sat": "true", "unsat": "false"}.get(res.status, res.status)
        return SolveResult(status, outer, time.monotonic() - start)

    code, out, err, wall = _run(h, inst.to_qdimacs(), ".qdimacs")
    if code is None:
        return SolveResult("timeout", None, wall, err)
    if code not in (10, 20):
        raise SolverError(f"QBF solver exited with code {code}; stderr: {err.strip()}")
    if code == 20:
        return SolveResult("false", None, wall, err)
    values = _parse_values(out, upper_too=True)
    outer_vars = inst.outer_vars()
    outer = None
    if values and all(v in values for v in outer_vars):
        outer = {v: values[v] for v in outer_vars}
    return SolveResult("true", outer, wall, err)


def main(argv: list[str] | None = None) -> int:
    """Run the builtin solvers as a conformant external process.

    ``python -m cnotforge.solvers FILE.cnf`` or ``--qbf FILE.qdimacs``.
    """
    import argparse

    ap = argparse.ArgumentParser(prog="cnotforge-solve")
    ap.add_argument("--qbf", action="store_true")
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("path")
    args = ap.parse_args(argv)
    with open(args.path) as f:
        text = f.read()
    deadline = time.monotonic() + args.time_limit
    if args.qbf:
        nv, prefix, clauses = parse_qdimacs(text)
        outer = prefix[0][1] if prefix and prefix[0][0] == "e" else []
        top, flat = expand(nv, prefix, clauses)
        res, model = cdcl.fast_solve(top, flat, deadline)
        if res is None:
            return 0
        if res:
            print("s cnf 1")
            for v in outer:
                print(f"V {v if model[v] else -v} 0")
            return 10
        print("s cnf 0")
        return 20
    nv, clauses = parse_dimacs(text)
    res, model = cdcl.fast_solve(nv, clauses, deadline)
    if res is None:
        print("s UNKNOWN")
        return 0
    if res:
        print("s SATISFIABLE")
        print("v " + " ".join(str(v if model[v] else -v) for v in range(1, nv + 1)) + " 0")
        return 10
    print("s UNSATISFIABLE")
    return 20


if __name__ == "__main__":
    sys.exit(main())
