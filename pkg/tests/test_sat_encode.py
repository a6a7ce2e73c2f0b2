import pytest

from cnotforge.coupling import complete, line
from cnotforge.gf2 import from_gate_list, identity, permute_columns, weak_match
from cnotforge.plan import Plan, check_plan
from cnotforge.sat_encode import (
    DecodeError,
    asap_layers,
    decode,
    encode_count,
    encode_depth,
    find_optimum,
    normalize_variant,
    probe_bound,
    upper_bound_gates,
)
from cnotforge.solvers import solve_cnf


def status(sat, inst):
    return solve_cnf(sat, inst).status


@pytest.mark.parametrize(
    "variant,k,expected",
    [("S", 3, "sat"), ("S", 2, "unsat"), ("W", 2, "sat"), ("W", 1, "unsat"),
     ("S+R", 8, "sat"), ("S+R", 7, "unsat"), ("W+R", 5, "sat"), ("W+R", 4, "unsat")],
)
def test_count_frontier_on_example(example, line4, sat, variant, k, expected):
    cp = line4 if variant.endswith("+R") else None
    assert status(sat, encode_count(example, k, variant, cp)) == expected


def test_identity_at_zero(sat):
    inst = encode_count(identity(4), 0)
    res = solve_cnf(sat, inst)
    assert res.status == "sat"
    assert decode(res.model, inst) == Plan()
    assert not any(sym[0] in ("ctrl", "tgt") for sym in inst.varmap)


def test_symbols_and_sizes(example):
    inst = encode_count(example, 2)
    assert ("m", 2, 3, 3) in inst.varmap and ("ctrl", 1, 0) in inst.varmap
    assert all(abs(l) <= inst.var_count for cl in inst.clauses for l in cl)
    assert all(cl for cl in inst.clauses)
    text = inst.to_dimacs()
    assert "c var 1 = m[0][0][0]" in text


def test_weak_decode_matches_up_to_permutation(example, sat):
    inst = encode_count(example, 2, "W")
    res = solve_cnf(sat, inst)
    plan = decode(res.model, inst)
    assert plan.input_perm is not None
    wires = from_gate_list(4, plan.circuit_gates())
    assert weak_match(example, wires) == plan.output_permutation(4)


def test_depth_weak_two_layers(example, sat):
    assert status(sat, encode_depth(example, 2, "W")) == "sat"
    assert status(sat, encode_depth(example, 1, "W")) == "unsat"


def test_depth_parallel_layer(sat):
    m = from_gate_list(4, [(0, 1), (2, 3)])
    inst = encode_depth(m, 1)
    res = solve_cnf(sat, inst)
    plan = decode(res.model, inst)
    assert plan.steps == (frozenset({(0, 1), (2, 3)}),)
    assert check_plan(m, plan).ok


def test_depth_without_alo_still_sound(sat, example):
    inst = encode_depth(example, 4, at_least_one=False)
    res = solve_cnf(sat, inst)
    assert res.status == "sat"
    assert check_plan(example, decode(res.model, inst)).ok


def test_decode_rejects_inconsistent_model(example, sat):
    inst = encode_count(example, 3)
    res = solve_cnf(sat, inst)
    bad = dict(res.model)
    for q in range(4):
        bad[inst.varmap[("ctrl", 0, q)]] = True
    with pytest.raises(DecodeError):
        decode(bad, inst)


@pytest.mark.parametrize(
    "variant,metric,expected",
    [("S", "count", 3), ("W", "count", 2), ("S+R", "count", 8), ("W+R", "count", 5)],
)
def test_find_optimum_example(example, line4, sat, variant, metric, expected):
    cp = line4 if variant.endswith("+R") else None
    opt = find_optimum(example, variant, metric, cp, sat)
    assert opt.status == "optimal" and opt.bound == expected
    assert check_plan(example, opt.plan, cp, weak=variant.startswith("W")).ok


def test_find_optimum_identity(sat, line4):
    for v in ("S", "W", "S+R", "W+R"):
        for metric in ("count", "depth"):
            cp = line4 if v.endswith("+R") else None
            assert find_optimum(identity(4), v, metric, cp, sat).bound == 0


def test_find_optimum_timeout(example, line4, sat):
    opt = find_optimum(example, "S+R", "count", line4, sat, budget=1e-9)
    assert opt.status == "timeout" and opt.plan is None


def test_weak_restricted_plan_respects_graph(example, line4, sat):
    opt = find_optimum(example, "W+R", "count", line4, sat)
    assert all(g in line4.pairs for g in opt.plan.circuit_gates())
    perm = opt.plan.output_permutation(4)
    assert from_gate_list(4, opt.plan.circuit_gates()) == permute_columns(example, perm)


def test_probe_bound(example, sat):
    assert probe_bound(example, 2, "S", "count", None, sat)[0] == "unsat"
    st, plan = probe_bound(example, 3, "S", "count", None, sat)
    assert st == "sat" and plan.cnot_count == 3


def test_upper_bound_routing(example, line4):
    gates = upper_bound_gates(example, "S+R", line4)
    assert all(g in line4.pairs for g in gates)
    assert from_gate_list(4, gates) == example
    far = from_gate_list(4, [(0, 3)])
    routed = upper_bound_gates(far, "S+R", line4)
    assert from_gate_list(4, routed) == far and len(routed) > 1


def test_asap_layers():
    assert asap_layers([(0, 1), (2, 3), (1, 2)]) == [frozenset({(0, 1), (2, 3)}), frozenset({(1, 2)})]


def test_variant_handling(example):
    assert normalize_variant("wr") == "W+R" and normalize_variant("s+r") == "S+R"
    with pytest.raises(ValueError):
        normalize_variant("x")
    with pytest.raises(ValueError):
        encode_count(example, 1, "S+R")
    with pytest.raises(ValueError):
        encode_count(example, 1, "S", line(4))
    with pytest.raises(ValueError):
        encode_count(example, -1)
    encode_count(example, 1, "S", complete(4))
