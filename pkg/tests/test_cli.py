import json

import pytest

from cnotforge.cli import main
from cnotforge.qbf import parse_qdimacs

from conftest import EXAMPLE_QASM


@pytest.fixture
def qasm(tmp_path):
    p = tmp_path / "ex.qasm"
    p.write_text(EXAMPLE_QASM)
    return p


@pytest.mark.parametrize(
    "variant,extra,expected",
    [("s", [], 3), ("w", [], 2), ("sr", ["--line", "4"], 8), ("wr", ["--line", "4"], 5)],
)
def test_synth_variants_round_trip(qasm, tmp_path, capsys, variant, extra, expected):
    out = tmp_path / "out.qasm"
    rc = main(["synth", "--input", str(qasm), "--variant", variant, *extra, "--output", str(out)])
    assert rc == 0
    assert f"optimal CNOT count: {expected}" in capsys.readouterr().out
    assert main(["verify", "--original", str(qasm), "--optimized", str(out), *extra]) == 0
    kind = "weak" if variant.startswith("w") else "strong"
    assert f"equivalent ({kind})" in capsys.readouterr().out


def test_emit_swaps_verifies(qasm, tmp_path, capsys):
    out = tmp_path / "out.qasm"
    assert main(["synth", "--input", str(qasm), "--variant", "w", "--emit-swaps", "--output", str(out)]) == 0
    assert "swap" in out.read_text()
    assert main(["verify", "--original", str(qasm), "--optimized", str(out)]) == 0


def test_depth_and_report(qasm, tmp_path, capsys):
    rep = tmp_path / "r.json"
    out = tmp_path / "o.qasm"
    assert main(["synth", "--input", str(qasm), "--metric", "depth", "--report", str(rep), "--output", str(out)]) == 0
    data = json.loads(rep.read_text())
    assert data["metric"] == "depth" and data["cnot_depth"] == 3
    assert "optimal CNOT depth: 3" in capsys.readouterr().out


def test_identity_matrix_file(tmp_path, capsys):
    m = tmp_path / "id.txt"
    m.write_text("n 3\n100\n010\n001\n")
    assert main(["synth", "--input", str(m)]) == 0
    assert "optimal CNOT count: 0" in capsys.readouterr().out


def test_fixed_k(qasm, capsys):
    assert main(["synth", "--input", str(qasm), "--k", "2"]) == 0
    assert "k=2: unsatisfiable" in capsys.readouterr().out
    assert main(["synth", "--input", str(qasm), "--k", "3"]) == 0
    assert "k=3: satisfiable" in capsys.readouterr().out


def test_encode_formats(qasm, tmp_path, capsys):
    cnf = tmp_path / "a.cnf"
    assert main(["encode", "--input", str(qasm), "--format", "dimacs", "--k", "3", "--output", str(cnf)]) == 0
    assert cnf.read_text().lstrip().startswith(("c", "p cnf"))
    qd = tmp_path / "a.qdimacs"
    assert main(["encode", "--input", str(qasm), "--format", "qdimacs", "--k", "3", "--output", str(qd)]) == 0
    _, prefix, _ = parse_qdimacs(qd.read_text())
    assert [b[0] for b in prefix] == ["e", "a", "e"]
    d = tmp_path / "pddl"
    assert main(["encode", "--input", str(qasm), "--variant", "sr", "--line", "4", "--format", "pddl", "--output", str(d)]) == 0
    assert "connected" in (d / "domain.pddl").read_text()
    assert "(connected q1 q2)" in (d / "problem.pddl").read_text()


def test_peephole_report(tmp_path, capsys):
    src = tmp_path / "mixed.qasm"
    src.write_text(EXAMPLE_QASM.replace("cx q[1],q[0];\ncx q[3],q[1];\n", "cx q[1],q[0];\nh q[2];\ncx q[3],q[1];\n", 1))
    rep, out = tmp_path / "rep.json", tmp_path / "out.qasm"
    assert main(["peephole", "--input", str(src), "--variant", "w", "--report", str(rep), "--output", str(out)]) == 0
    data = json.loads(rep.read_text())
    assert data["after"]["cnot_count"] <= data["before"]["cnot_count"]
    assert main(["verify", "--original", str(src), "--optimized", str(out)]) == 0


def test_verify_failures(qasm, tmp_path, capsys):
    empty = tmp_path / "empty.qasm"
    empty.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[4];\n')
    assert main(["verify", "--original", str(qasm), "--optimized", str(empty)]) == 1
    assert "not equivalent" in capsys.readouterr().out
    # equivalent but not routed on a line
    assert main(["verify", "--original", str(qasm), "--optimized", str(qasm), "--line", "4"]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["synth", "--input", "/nonexistent.qasm"],
        ["synth", "--input", "{qasm}", "--variant", "sr"],
        ["synth", "--input", "{qasm}", "--line", "3", "--variant", "sr"],
        ["synth", "--input", "{qasm}", "--variant", "zz"],
        ["synth", "--input", "{qasm}", "--k", "-1"],
        ["synth", "--input", "{qasm}", "--backend", "oracle", "--k", "2"],
        ["encode", "--input", "{qasm}", "--format", "dimacs"],
        ["encode", "--input", "{qasm}", "--format", "qdimacs", "--variant", "w", "--k", "2"],
        ["encode", "--input", "{qasm}", "--format", "pddl"],
        ["peephole", "--input", "{qasm}", "--variant", "wr", "--line", "4"],
        ["synth"],
        ["bogus"],
    ],
)
def test_usage_errors(qasm, capsys, argv):
    argv = [a.replace("{qasm}", str(qasm)) for a in argv]
    assert main(argv) == 2


def test_non_cnot_synth_is_usage_error(tmp_path, capsys):
    p = tmp_path / "h.qasm"
    p.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n')
    assert main(["synth", "--input", str(p)]) == 2
    assert "peephole" in capsys.readouterr().err


def test_timeout_exit(qasm, capsys):
    assert main(["synth", "--input", str(qasm), "--timeout", "1e-9"]) == 4


def test_identity_k0_has_no_action_variables(tmp_path, capsys):
    m = tmp_path / "id.txt"
    m.write_text("n 3\n1 0 0\n0 1 0\n0 0 1\n")
    cnf = tmp_path / "id.cnf"
    assert main(["encode", "--input", str(m), "--format", "dimacs", "--k", "0", "--output", str(cnf)]) == 0
    text = cnf.read_text()
    assert "ctrl" not in text and "tgt" not in text
    header = next(ln for ln in text.splitlines() if ln.startswith("p cnf"))
    assert int(header.split()[2]) == 9
