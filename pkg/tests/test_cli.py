import json

import pytest

from posmap.cli import run


def lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines()]


def test_classify(capsys, tmp_path):
    out = tmp_path / "cats.csv"
    assert run(["classify", "--n-max", "12", "--seed", "3", "--csv", str(out)]) == 0
    recs = lines(capsys)
    by_pair = {(r["n"], r["k"]): r for r in recs}
    assert by_pair[(8, 4)]["category"] == "COR1"
    assert all(r["seed"] == 3 for r in recs)
    assert out.read_text().splitlines()[0] == "n,k,category"


def test_verify_lemma(capsys):
    assert run(["verify-lemma", "--n-max", "8", "--samples", "1000"]) == 0
    assert all(r["ok"] for r in lines(capsys))


def test_spectrum(capsys):
    assert run(["spectrum", "--n", "8", "--k", "4"]) == 0
    (rep,) = lines(capsys)
    assert rep["c_min"] == pytest.approx(-1) and rep["seed"] == 0


def test_lambda_max(capsys):
    assert run(["lambda-max", "--n", "4", "--k", "2", "--restarts", "10", "--seed", "7"]) == 0
    (res,) = lines(capsys)
    assert res["lambda_max"] == pytest.approx(2, abs=1e-6) and res["seed"] == 7
    args = ["lambda-max", "--n", "6", "--k", "3", "--theta", "1.5707963", "--phi", "0", "--restarts", "10"]
    assert run(args) == 0
    first = capsys.readouterr().out
    assert run(args) == 0
    assert capsys.readouterr().out == first


def test_scan_and_report(capsys, tmp_path):
    ck, out = tmp_path / "g.json", tmp_path / "g.csv"
    args = ["scan", "--n", "6", "--k", "3", "--phi-res", "3", "--theta-res", "2", "--restarts", "5"]
    assert run([*args, "--checkpoint", str(ck), "--export-csv", str(out)]) == 0
    assert lines(capsys)[0]["points"] == 6
    assert len(out.read_text().splitlines()) == 7
    code = run(["report", "--checkpoint", str(ck)])
    (rep,) = lines(capsys)
    assert rep["n"] == 6 and code == (0 if rep["range_ok"] and rep["symmetry_defect"] <= 0.05 else 1)


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["classify", "--n-max", "x"], ["lambda-max", "--n", "5", "--k", "2"],
     ["lambda-max", "--n", "6", "--k", "3", "--phi", "0"], ["scan", "--n", "8", "--k", "4"],
     ["report", "--checkpoint", "/nonexistent.json"]],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().out == ""
