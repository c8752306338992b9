import csv
import io
import json

import pytest

from lwskit.cli import fit_exponent, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_matrix_chain_inline(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "matrix-chain", "--dims", "10,20,30,40")
    assert code == 0 and out.splitlines()[0] == "18000"


def test_solve_lis_decodes(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "lis", "--seq", "3,1,4,1,5,9,2,6")
    assert code == 0 and out.splitlines()[0] == "4"


def test_solve_knuth(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "optimal-bst", "--freq", "4,2,6", "--solver", "knuth")
    assert code == 0 and out.splitlines()[0] == "20"


@pytest.mark.parametrize("problem", ["pt", "lis", "refuel", "kminip", "negtriangle", "slicerank1-2dlws"])
def test_verify_naive(capsys, problem):
    code, out, _ = run(capsys, "verify", "--problem", problem, "--n", "6", "--seeds", "10")
    assert code == 0 and out.startswith("PASS")


@pytest.mark.parametrize("solver", ["dc", "rank1", "slicerank1", "fast"])
def test_verify_fast_solvers(capsys, solver):
    problem = "rank1-kdlws" if solver == "rank1" else "slicerank1-2dlws"
    code, out, _ = run(capsys, "verify", "--problem", problem, "--n", "7", "--seeds", "8", "--solver", solver)
    assert code == 0, out


def test_gen_then_solve(tmp_path, capsys):
    path = tmp_path / "inst.json"
    assert main(["gen", "--problem", "kdlws", "--n", "5", "--k", "2", "--seed", "3", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert doc["k"] == 2 and doc["n"] == 5
    answers = set()
    for solver in ("naive", "dc"):
        code, out, _ = run(capsys, "solve", "--in", str(path), "--solver", solver)
        assert code == 0
        answers.add(out.splitlines()[0])
    assert len(answers) == 1


def test_gen_is_deterministic(capsys):
    a = run(capsys, "gen", "--problem", "pt", "--n", "6", "--seed", "11")[1]
    b = run(capsys, "gen", "--problem", "pt", "--n", "6", "--seed", "11")[1]
    assert a == b


@pytest.mark.parametrize("src,dst,problem,extra", [
    ("kminip", "kdlws", "kminip", []),
    ("negtriangle", "2dlws", "negtriangle", []),
    ("2dlws", "pt", "interval2d", []),
    ("2dlws", "pt-slice", None, []),
    ("sat", "kov", "sat", ["--k", "2"]),
    ("kov", "zkov", "kov", ["--l", "2"]),
])
def test_reduce_certify(tmp_path, capsys, src, dst, problem, extra):
    inp = tmp_path / "src.json"
    if problem is None:
        from lwskit.dp_core import instance_to_json
        from lwskit.generate import random_interval2d_slice
        inp.write_text(json.dumps(instance_to_json(random_interval2d_slice(4, 2, 0))))
    else:
        assert main(["gen", "--problem", problem, "--n", "4", "--d", "2", "--seed", "1", "--out", str(inp)]) == 0
    out_path = tmp_path / "tgt.json"
    code, out, _ = run(capsys, "reduce", "--from", src, "--to", dst, "--in", str(inp), "--out", str(out_path),
                       "--certify", *extra)
    assert code == 0 and out.strip().endswith("PASS")
    assert json.loads(out_path.read_text())


def test_bench_small_grid(tmp_path, capsys):
    dat = tmp_path / "b.dat"
    code, out, err = run(capsys, "bench", "--grid", "32,64", "--reps", "1", "--dat", str(dat))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 and {r["solver"] for r in rows} == {"naive", "fast"}
    assert len({r["answer"] for r in rows if r["n"] == "64"}) == 1
    assert "# exponent fast" in err
    assert dat.read_text().startswith("# n naive_seconds fast_seconds")


def test_fit_exponent():
    ns = [10, 20, 40, 80]
    assert fit_exponent(ns, [n**3 for n in ns]) == pytest.approx(3.0)


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "--in", str(tmp_path / "nope.json"))
    assert code == 3 and "error" in err


def test_wrong_schema(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema": "other", "kind": "pt"}))
    assert run(capsys, "solve", "--in", str(p))[0] == 3


def test_solver_outside_class(capsys, tmp_path):
    p = tmp_path / "pt.json"
    main(["gen", "--problem", "pt", "--n", "5", "--out", str(p)])
    assert run(capsys, "solve", "--in", str(p), "--solver", "fast")[0] == 5


def test_knuth_precondition(capsys):
    assert run(capsys, "solve", "--problem", "matrix-chain", "--dims", "3,1,4,1,5", "--solver", "knuth")[0] == 5


def test_unknown_reduction(capsys, tmp_path):
    p = tmp_path / "s.json"
    main(["gen", "--problem", "sat", "--n", "3", "--out", str(p)])
    assert run(capsys, "reduce", "--from", "sat", "--to", "pt", "--in", str(p))[0] == 3


def test_bad_arguments():
    with pytest.raises(SystemExit) as e:
        main(["solve", "--n", "notanint"])
    assert e.value.code == 2


def test_unknown_verify_problem(capsys):
    assert run(capsys, "verify", "--problem", "nothing")[0] == 3
