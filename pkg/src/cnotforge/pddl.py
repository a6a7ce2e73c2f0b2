"""Planning formulation: PDDL domain/problem text and plan validation.

Matrix cells become ``(m ?r ?c)`` facts and each CNOT is a ``cnot`` action
whose conditional effects add the control column into the target column.
"""

from __future__ import annotations

import re

from .coupling import CouplingGraph
from .gf2 import ParityMatrix
from .plan import Plan, check_plan

_DOMAIN = """(define (domain cnot-synthesis)
  (:requirements :strips :typing :negative-preconditions :equality :conditional-effects)
  (:types qubit)
(:predicates
  (m ?r ?c - qubit){connected_pred})
(:action cnot
  :parameters (?c ?t - qubit)
  :precondition (and
    (not(= ?c ?t)){connected_pre})
  :effect (and
    (forall(?r - qubit)
      (when (and (m ?r ?c)    (m ?r ?t))
                          (not(m ?r ?t))))
    (forall(?r - qubit)
      (when (and (m ?r ?c)(not(m ?r ?t)))
                              (m ?r ?t))))))
"""


class PddlError(ValueError):
    pass


def emit_domain(variant: str = "S+R") -> str:
    """Domain text. The unrestricted domain has no ``connected`` predicate at all."""
    v = variant.upper().replace("SR", "S+R")
    if v not in ("S", "S+R"):
        raise PddlError(f"no planning domain for variant {variant!r}; use S or S+R")
    restricted = v == "S+R"
    return _DOMAIN.format(
        connected_pred="(connected ?a ?b - qubit)" if restricted else "",
        connected_pre="(connected ?c ?t)" if restricted else "",
    )


def emit_problem(m: ParityMatrix, cp: CouplingGraph | None = None, name: str = "cnot-problem") -> str:
    n = m.n
    if cp is not None and cp.n != n:
        raise PddlError(f"coupling graph has {cp.n} qubits, matrix has {n}")
    objs = " ".join(f"q{i}" for i in range(n))
    init = ["  " + "".join(f"(m q{i} q{i})" for i in range(n))]
    if cp is not None:
        # Both directions of each edge, listed per edge as the hardware sees it.
        edges = sorted({tuple(sorted(p)) for p in cp.pairs})
        for a, b in edges:
            init.append(f"  (connected q{a} q{b})(connected q{b} q{a})")
    goal = []
    for r in range(n):
        cells = [f"(m q{r} q{c})" if m.bit(r, c) else f"(not(m q{r} q{c}))" for c in range(n)]
        goal.append("      " + "".join(cells))
    return (
        f"(define (problem {name})\n"
        "  (:domain cnot-synthesis)\n"
        f"(:objects {objs} - qubit)\n"
        "(:init\n" + "\n".join(init) + ")\n"
        "(:goal (and\n" + "\n".join(goal) + ")))\n"
    )


_ACTION = re.compile(r"^\(\s*([^\s()]+)((?:\s+[^\s()]+)*)\s*\)(?:\s*;.*)?$")


def parse_plan(text: str, n: int | None = None) -> Plan:
    """Read planner output: one ``(cnot qC qT)`` per line; ``;`` comments allowed."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        # Some planners prefix the step number ("0: (cnot q1 q0)").
        line = re.sub(r"^\d+(\.\d+)?\s*:\s*", "", line)
        mt = _ACTION.match(line)
        if not mt:
            raise PddlError(f"line {lineno}: cannot parse {raw!r}")
        name, args = mt.group(1).lower(), mt.group(2).split()
        if name != "cnot":
            raise PddlError(f"line {lineno}: unknown action {name!r}")
        if len(args) != 2:
            raise PddlError(f"line {lineno}: cnot takes two objects, got {len(args)}")
        qs = []
        for a in args:
            om = re.fullmatch(r"q(\d+)", a.lower())
            if not om or (n is not None and int(om.group(1)) >= n):
                raise PddlError(f"line {lineno}: unknown object {a!r}")
            qs.append(int(om.group(1)))
        steps.append(frozenset([(qs[0], qs[1])]))
    return Plan(tuple(steps), None)


def validate_plan(m: ParityMatrix, plan: Plan, cp: CouplingGraph | None = None) -> bool:
    if any(len(s) != 1 for s in plan.steps):
        return False
    try:
        return check_plan(m, plan, cp).ok
    except ValueError:
        return False


def read_sexpr(text: str):
    """Nested lists from s-expression text (``;`` comments dropped)."""
    text = re.sub(r";[^\n]*", "", text)
    tokens = re.findall(r"\(|\)|[^\s()]+", text)
    stack: list[list] = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise PddlError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok.lower())
    if len(stack) != 1:
        raise PddlError("unbalanced '('")
    return stack[0]


__all__ = ["PddlError", "emit_domain", "emit_problem", "parse_plan", "read_sexpr", "validate_plan"]
