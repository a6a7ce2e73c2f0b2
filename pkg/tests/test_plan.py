from cnotforge.coupling import line
from cnotforge.gf2 import Permutation, from_gate_list, identity
from cnotforge.plan import Plan, check_plan

from conftest import EXAMPLE_GATES, RESTRICTED_8, STRONG_3, WEAK_2, WEAK_RESTRICTED_5


def test_strong_plan_checks(example):
    plan = Plan.from_gates(STRONG_3)
    assert plan.cnot_count == 3 and plan.depth == 3
    assert check_plan(example, plan).ok
    assert not check_plan(example, Plan.from_gates(STRONG_3[::-1])).ok


def test_restricted_plan(example, line4):
    assert check_plan(example, Plan.from_gates(RESTRICTED_8), line4).ok
    res = check_plan(example, Plan.from_gates(STRONG_3), line4)
    assert not res.ok and any("coupling" in p for p in res.problems)


def test_weak_plan_from_relabeled_gates(example):
    # Circuit gates (1,0),(1,3) on wires; wire 1 ends with logical 3. Expressed as a
    # plan: columns are permuted so that the same gates act on columns.
    perm = Permutation.transposition(4, 1, 3)
    plan = Plan.from_gates([(perm(c), perm(t)) for c, t in WEAK_2], perm)
    assert plan.circuit_gates() == WEAK_2
    assert plan.output_permutation(4) == perm.inverse()
    assert check_plan(example, plan, weak=True).ok
    assert not check_plan(example, plan).ok  # strong check refuses a permutation


def test_weak_restricted_circuit(example, line4):
    # Wires end holding logical outputs 0, 3, 1, 2 (wire 1 holds q3 etc).
    wires = from_gate_list(4, WEAK_RESTRICTED_5)
    assert sorted(wires.cols) == sorted(example.cols)
    assert all(p in line4.pairs for p in WEAK_RESTRICTED_5)


def test_step_disjointness():
    m = from_gate_list(4, [(0, 1), (2, 3)])
    assert check_plan(m, Plan((frozenset({(0, 1), (2, 3)}),))).ok
    bad = Plan((frozenset({(0, 1), (1, 2)}),))
    assert any("reuses" in p for p in check_plan(from_gate_list(4, [(0, 1), (1, 2)]), bad).problems)


def test_empty_plan_replays_identity():
    assert Plan().replay(3) == identity(3)
    assert check_plan(identity(3), Plan()).ok
    assert check_plan(from_gate_list(4, EXAMPLE_GATES), Plan.from_gates(EXAMPLE_GATES)).ok
