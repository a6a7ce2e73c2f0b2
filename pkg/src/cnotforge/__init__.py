"""Optimal CNOT resynthesis by SAT, QBF and planning encodings."""

from .circuit import Circuit, Gate, emit_qasm, parse_qasm
from .coupling import CouplingGraph, complete, line, parse_coupling
from .gf2 import ParityMatrix, Permutation, from_gate_list, identity
from .peephole import optimize, verify
from .plan import Plan, check_plan
from .sat_encode import Optimum, find_optimum

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CouplingGraph",
    "Gate",
    "Optimum",
    "ParityMatrix",
    "Permutation",
    "Plan",
    "check_plan",
    "complete",
    "emit_qasm",
    "find_optimum",
    "from_gate_list",
    "identity",
    "line",
    "optimize",
    "parse_coupling",
    "parse_qasm",
    "verify",
]
