import json

import pytest

from biramanujan.cli import EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_then_verify(tmp_path, capsys):
    code, out, _ = run(capsys, "construct", 3, 2, 2, "-o", tmp_path)
    assert code == EXIT_OK and "VALID" in out
    graph = tmp_path / "graph_n3_k2_d2.txt"
    assert graph.exists()
    assert (tmp_path / "graph_n3_k2_d2.trail.txt").read_text().count("\nstep ") == 3
    assert "valid 1" in (tmp_path / "graph_n3_k2_d2.cert.txt").read_text()
    code, out, _ = run(capsys, "verify", graph, 2, 2, "-o", tmp_path / "c.txt")
    assert code == EXIT_OK and (tmp_path / "c.txt").exists()


def test_construct_is_reproducible(tmp_path, capsys):
    for sub in ("a", "b"):
        assert run(capsys, "construct", 2, 2, 3, "-o", tmp_path / sub)[0] == EXIT_OK
    for name in ("graph_n2_k2_d3.txt", "graph_n2_k2_d3.trail.txt", "graph_n2_k2_d3.cert.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_construct_single_right_vertex(tmp_path, capsys):
    code, out, _ = run(capsys, "construct", 1, 3, 2, "-o", tmp_path, "--json")
    assert code == EXIT_OK
    assert json.loads(out)["certificate"]["valid"] is True


def test_verify_failures(tmp_path, capsys):
    bad = tmp_path / "disc.txt"
    bad.write_text("2 2 2\n1 1 2\n3 1 2\n2 2 2\n4 2 2\n")
    assert run(capsys, "verify", bad, 2, 2)[0] == EXIT_FAIL
    irregular = tmp_path / "irr.txt"
    irregular.write_text("2 2 2\n1 1 1\n")
    code, out, _ = run(capsys, "verify", irregular, 2, 2, "--json")
    assert code == EXIT_FAIL and json.loads(out)["biregular"] is False
    garbage = tmp_path / "junk.txt"
    garbage.write_text("hello\n")
    assert run(capsys, "verify", garbage, 2, 2)[0] == EXIT_INPUT
    assert run(capsys, "verify", tmp_path / "missing.txt", 2, 2)[0] == EXIT_INPUT


def test_convolve(tmp_path, capsys):
    p, q = tmp_path / "p.txt", tmp_path / "q.txt"
    p.write_text("2\n1 -2 1\n")  # degree, then ascending coefficients: (x-1)^2
    q.write_text("2\n1 -2 1\n")
    code, out, _ = run(capsys, "convolve", p, q, 2, 2, "-o", tmp_path / "r.txt")
    assert code == EXIT_OK
    assert out.split() == ["2", "3/1", "-4/1", "1/1"]
    assert out == (tmp_path / "r.txt").read_text()
    code, out, _ = run(capsys, "convolve", p, q, 2, 2, "--json")
    assert code == EXIT_OK and json.loads(out)["m"] == 2


def test_convolve_rejects_bad_dims(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("2\n1 -2 1\n")
    assert run(capsys, "convolve", p, p, 1, 2)[0] == EXIT_INPUT
    assert run(capsys, "convolve", p, p, 3, 3)[0] == EXIT_INPUT


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", 2, 2, "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["ramanujan"]["approx"] == pytest.approx(1 + 3**0.5)
    code, out, _ = run(capsys, "bound", 2, 3)
    assert "3.65028" in out
    assert run(capsys, "bound", 2, 2, "--theta", "1")[0] == EXIT_OK
    assert run(capsys, "bound", 0, 2)[0] == EXIT_INPUT


def test_expected_poly(tmp_path, capsys):
    state = tmp_path / "s.txt"
    state.write_text("2 2 2\nclaw 1 1 1 3\nclaw 1 2 2 4\n")
    code, out, _ = run(capsys, "expected-poly", state, "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["reduced"]) == 2
    state.write_text("2 2 2\nclaw 1 3 1 2\n")
    assert run(capsys, "expected-poly", state)[0] == EXIT_INPUT


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "list")
    assert code == EXIT_OK and "quadrature" in out
    code, out, _ = run(capsys, "oracle", "sumdet", "--json", "--seed", "3")
    assert code == EXIT_OK and json.loads(out)["passed"] is True
    assert run(capsys, "oracle", "nonsense")[0] == EXIT_INPUT
    assert run(capsys, "oracle", "quadrature", "--cap", "10")[0] == EXIT_CAP


def test_bad_worker_count(capsys):
    assert run(capsys, "bound", 2, 2, "--workers", "0")[0] == EXIT_INPUT


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["construct", "two", "2", "2"])
    assert exc.value.code == 2
