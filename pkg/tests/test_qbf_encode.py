import random

import pytest

from cnotforge.coupling import line
from cnotforge.gf2 import from_gate_list, identity, random_full_rank
from cnotforge.qbf_encode import decode_outer, encode_qbf, expand_universals, row_bits
from cnotforge.sat_encode import DecodeError, encode_count, encode_depth, find_optimum
from cnotforge.solvers import SolverHandle, solve_cnf, solve_qbf


def test_row_bits():
    assert [row_bits(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_prefix_shape(example):
    q = encode_qbf(example, 2)
    kinds = [b[0] for b in q.prefix]
    assert kinds == ["e", "a", "e"]
    outer, univ, inner = (set(b[1]) for b in q.prefix)
    assert len(univ) == 2
    assert outer | univ | inner == set(range(1, q.var_count + 1))
    assert not (outer & univ or outer & inner or univ & inner)
    syms = {q.pool.by_id[v][0] for v in outer}
    assert syms == {"ctrl", "tgt"}
    assert "a " in q.to_qdimacs()


def test_example_truth(example, sat):
    for k, expected in [(2, "unsat"), (3, "sat")]:
        assert solve_cnf(sat, expand_universals(encode_qbf(example, k))).status == expected


def test_identity_k0(sat):
    q = encode_qbf(identity(3), 0)
    res = solve_cnf(sat, expand_universals(q))
    assert res.status == "sat"
    assert decode_outer(res.model, q).steps == ()


def test_single_qubit_has_no_universals(sat):
    q = encode_qbf(identity(1), 0)
    assert all(kind != "a" or not vs for kind, vs in q.prefix)
    assert solve_cnf(sat, expand_universals(q)).status == "sat"


def test_decoded_plan_replays(example, sat):
    q = encode_qbf(example, 3)
    res = solve_cnf(sat, expand_universals(q))
    plan = decode_outer(res.model, q)
    assert from_gate_list(4, plan.circuit_gates()) == example


def test_corrupt_certificate_rejected(example, sat):
    q = encode_qbf(example, 3)
    res = solve_cnf(sat, expand_universals(q))
    bad = dict(res.model)
    bad[q.varmap[("ctrl", 0, 0)]] = True
    bad[q.varmap[("ctrl", 0, 2)]] = True
    with pytest.raises(DecodeError):
        decode_outer(bad, q)


def test_weak_rejected(example):
    with pytest.raises(ValueError):
        encode_qbf(example, 2, "W")


def test_dead_codes_do_not_constrain(sat):
    # n = 3 leaves code 3 unused; the instance must still be true when a plan exists.
    m = from_gate_list(3, [(0, 1), (1, 2)])
    assert solve_cnf(sat, expand_universals(encode_qbf(m, 2))).status == "sat"
    assert solve_cnf(sat, expand_universals(encode_qbf(m, 1))).status == "unsat"


def test_compact_growth():
    m6, m8 = identity(6), identity(8)
    q6, q8 = encode_qbf(m6, 3), encode_qbf(m8, 3)
    s6, s8 = encode_count(m6, 3), encode_count(m8, 3)
    # the SAT encoding grows faster in n than the symbolic-row encoding
    assert q8.var_count / q6.var_count < s8.var_count / s6.var_count
    assert len(q8.clauses) / len(q6.clauses) < len(s8.clauses) / len(s6.clauses)


@pytest.mark.parametrize("variant", ["S", "S+R"])
@pytest.mark.parametrize("metric", ["count", "depth"])
def test_frontier_agreement_sample(variant, metric, sat, line4):
    rng = random.Random(f"{variant}-{metric}")
    cp = line4 if variant == "S+R" else None
    enc = encode_count if metric == "count" else encode_depth
    for _ in range(4):
        m = random_full_rank(4, rng)
        opt = find_optimum(m, variant, metric, cp, sat).bound
        for k in range(opt + 2):
            a = solve_cnf(sat, expand_universals(encode_qbf(m, k, variant, metric, cp))).status
            b = solve_cnf(sat, enc(m, k, variant, cp)).status
            assert a == b, (k, a, b)


def test_qbf_backend_matches_sat(example, line4, sat):
    assert find_optimum(example, "S", "count", None, sat, backend="qbf").bound == 3
    assert find_optimum(example, "S+R", "depth", line4, sat, backend="qbf").bound == \
        find_optimum(example, "S+R", "depth", line4, sat).bound
    res = solve_qbf(SolverHandle("qbf"), encode_qbf(example, 3, "S+R", "count", line(4)))
    assert res.status == "false"
