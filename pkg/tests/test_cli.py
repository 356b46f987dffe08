import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from oracles import s1_bisection
from sltransmit.cli import build_parser, main
from sltransmit.corpus import baseline, mixed
from sltransmit.problem import save_problem
from sltransmit.spectrum import locate_eigenvalues


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("problems")
    paths = {"b0": d / "b0.json", "mixed": d / "mixed.json", "bad": d / "bad.json"}
    save_problem(baseline(), paths["b0"])
    save_problem(mixed(), paths["mixed"])
    raw = json.loads(paths["b0"].read_text())
    raw["left_bc"] = {"alpha1": 0, "alpha2": 0}
    paths["bad"].write_text(json.dumps(raw))
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def footer(text):
    (line,) = [ln for ln in text.splitlines() if ln.startswith("# ")]
    return json.loads(line[2:])


def error(err):
    lines = err.splitlines()
    assert len(lines) == 1
    obj = json.loads(lines[0])
    assert set(obj) == {"code", "message", "context"}
    return obj


def test_validate_baseline(capsys, files):
    code, out, _ = run(capsys, "validate", files["b0"])
    assert code == 0
    assert {r["quantity"]: float(r["value"]) for r in rows(out)} == {
        "theta": 1.0, "gamma": 1.0, "xi": 1.0, "rho": 1.0}


def test_validate_invalid(capsys, files):
    code, out, err = run(capsys, "validate", files["bad"])
    assert code == 2 and out == ""
    assert error(err)["code"] == "DegenerateLeftBC"


def test_spectrum_first_row(capsys, files):
    code, out, _ = run(capsys, "spectrum", files["b0"], "--count", "1")
    assert code == 0
    (row,) = rows(out)
    assert list(row) == ["index", "eigenvalue", "delta_at_root", "w_prime", "c1",
                         "bracket_lo", "bracket_hi"]
    mu = float(row["eigenvalue"])
    assert abs(mu - s1_bisection() ** 2) <= 1e-8
    assert float(row["bracket_lo"]) < mu < float(row["bracket_hi"])
    assert np.sign(float(row["w_prime"])) == np.sign(float(row["c1"]))


def test_spectrum_from(capsys, files):
    _, out, _ = run(capsys, "spectrum", files["b0"], "--count", "2", "--from", "5")
    assert float(rows(out)[0]["eigenvalue"]) == pytest.approx(10.818618674768, rel=1e-10)


def test_eigfun(capsys, files):
    code, out, _ = run(capsys, "eigfun", files["mixed"], "--index", "2", "--samples", "11",
                       "--nodes", "257")
    assert code == 0
    data = rows(out)
    assert len(data) == 44
    assert [int(r["segment"]) for r in data] == [i for i in range(1, 5) for _ in range(11)]
    meta = footer(out)
    assert meta["index"] == 2 and np.isfinite(meta["scalar"])


def test_expand(capsys, files):
    code, out, _ = run(capsys, "expand", files["b0"], "--target", "poly:[1,0,-1]x4",
                       "--terms", "6", "--nodes", "513")
    assert code == 0
    res = np.array([float(r["residual"]) for r in rows(out)])
    assert len(res) == 6 and np.all(np.diff(res) <= 1e-12 * footer(out)["norm"])


def test_resolvent(capsys, files):
    code, out, _ = run(capsys, "resolvent", files["mixed"], "--eta", "-2.5", "--rhs",
                       "gauss:4,0.1", "--scalar", "0.5", "--nodes", "513")
    assert code == 0
    meta = footer(out)
    assert meta["eta"] == -2.5
    assert meta["residual_f"] <= 1e-6 and meta["residual_h"] <= 1e-6
    assert len(rows(out)) == 4 * 513


def test_compare(capsys, files):
    code, out, _ = run(capsys, "compare", files["b0"], "--count", "5", "--mesh", "2000")
    assert code == 0
    assert all(float(r["rel_diff"]) <= 1e-3 for r in rows(out))


def test_gram(capsys, files):
    code, out, _ = run(capsys, "gram", files["b0"], "--count", "3", "--nodes", "513")
    G = np.array([float(r["gram"]) for r in rows(out)]).reshape(3, 3)
    assert code == 0
    assert np.allclose(G, np.eye(3), rtol=0, atol=1e-6)


def test_json_format(capsys, files):
    code, out, _ = run(capsys, "spectrum", files["b0"], "--count", "2", "--format", "json")
    obj = json.loads(out)
    assert code == 0
    assert obj["columns"][1] == "eigenvalue" and len(obj["rows"]) == 2


def test_output_file(capsys, files, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "spectrum", files["b0"], "--count", "2", "-o", str(target))
    assert code == 0 and out == ""
    _, direct, _ = run(capsys, "spectrum", files["b0"], "--count", "2")
    assert target.read_text() == direct


def test_byte_identical_repeats(capsys, files):
    outs = {run(capsys, "resolvent", files["mixed"], "--eta", "3", "--rhs",
                "poly:[1];[0,1];[1,1];[2]", "--nodes", "129")[1] for _ in range(2)}
    assert len(outs) == 1


def test_seventeen_digits(capsys, files):
    _, out, _ = run(capsys, "spectrum", files["b0"], "--count", "1")
    text = out.splitlines()[1].split(",")[1]
    mu = locate_eigenvalues(baseline(), 1)[0][0]
    assert text == format(mu, ".17g") and float(text) == mu


@pytest.mark.parametrize("argv,code_name", [
    (["spectrum", "{b0}", "--count", "0"], "UsageError"),
    (["eigfun", "{b0}", "--nodes", "100"], "UsageError"),
    (["compare", "{b0}", "--mesh", "4"], "UsageError"),
    (["resolvent", "{b0}", "--eta", "1", "--rhs", "sine:1"], "BadTarget"),
    (["expand", "{b0}", "--target", "poly:[1,x]x4"], "BadTarget"),
    (["spectrum", "{b0}", "--from", "nan"], "UsageError"),
    (["nosuch", "{b0}"], "UsageError"),
    (["validate", "/nonexistent/problem.json"], "IOError"),
])
def test_bad_input_exit_two(capsys, files, argv, code_name):
    code, out, err = run(capsys, *[a.format(**files) for a in argv])
    assert code == 2 and out == ""
    assert error(err)["code"] == code_name


def test_eta_on_spectrum_exit_four(capsys, files):
    _, out, _ = run(capsys, "spectrum", files["b0"], "--count", "1")
    mu = rows(out)[0]["eigenvalue"]
    code, out, err = run(capsys, "resolvent", files["b0"], "--eta", mu, "--rhs", "poly:[1]x4",
                         "--nodes", "65")
    assert code == 4 and out == ""
    assert error(err)["code"] == "EtaIsEigenvalue"


def test_numerical_failure_exit_three(capsys, files):
    code, out, err = run(capsys, "spectrum", files["b0"], "--count", "1", "--from", "1e20")
    assert code == 3 and out == ""
    assert error(err)["code"] == "StepFailure"


def test_help_documents_builtin_grammar():
    text = build_parser()._subparsers._group_actions[0].choices["expand"].format_help()
    assert "poly:" in text and "gauss:a,b" in text


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "sltransmit.cli", "validate", files["b0"]],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("quantity,value\n")
