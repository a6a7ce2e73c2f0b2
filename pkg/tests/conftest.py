import pytest

from cnotforge.coupling import line
from cnotforge.gf2 import ParityMatrix, from_gate_list
from cnotforge.solvers import SolverHandle

# Worked example: six CNOTs on four qubits and its parity matrix.
EXAMPLE_GATES = [(3, 1), (1, 3), (1, 0), (3, 1), (1, 0), (3, 1)]
EXAMPLE_ROWS = [[1, 0, 0, 0], [1, 1, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]]
STRONG_3 = [(1, 0), (3, 1), (1, 3)]
WEAK_2 = [(1, 0), (1, 3)]
RESTRICTED_8 = [(1, 0), (2, 3), (3, 2), (2, 1), (1, 2), (3, 2), (2, 3), (1, 2)]
WEAK_RESTRICTED_5 = [(1, 0), (1, 2), (2, 1), (1, 2), (2, 3)]

EXAMPLE_QASM = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[4];
cx q[3],q[1];
cx q[1],q[3];
cx q[1],q[0];
cx q[3],q[1];
cx q[1],q[0];
cx q[3],q[1];
"""


@pytest.fixture
def example() -> ParityMatrix:
    return from_gate_list(4, EXAMPLE_GATES)


@pytest.fixture
def line4():
    return line(4)


@pytest.fixture
def sat():
    return SolverHandle("sat", None, 120.0)
