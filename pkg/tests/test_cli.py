import json
import shutil
import subprocess

import pytest

from conftest import M_MINUS_1
from seifert_wrt.cli import RunConfig, fmt_complex, fmt_float, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_invariant_s2xs1(capsys):
    code, out, _ = run(capsys, "invariant", "o;0|0", "--r", "3..10")
    assert code == 0
    lines = out.splitlines()
    assert lines == [f"{r},1.0,0.0" for r in range(3, 11)]


def test_invariant_json(capsys):
    code, out, _ = run(capsys, "invariant", M_MINUS_1, "--r", "5..7", "--output", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["seifert"] == M_MINUS_1
    assert [v["r"] for v in payload["values"]] == [5, 6, 7]
    assert set(payload["values"][0]) == {"r", "re", "im"}


def test_invariant_high_precision_agrees(capsys):
    _, a, _ = run(capsys, "invariant", M_MINUS_1, "--r", "20..24")
    _, b, _ = run(capsys, "invariant", M_MINUS_1, "--r", "20..24", "--precision", "30")
    for la, lb in zip(a.splitlines(), b.splitlines()):
        va, vb = [float(v) for v in la.split(",")[1:]], [float(v) for v in lb.split(",")[1:]]
        assert all(abs(p - q) < 1e-12 for p, q in zip(va, vb))


def test_cs_spectrum(capsys):
    code, out, _ = run(capsys, "cs", M_MINUS_1, "--output", "json")
    recs = json.loads(out)
    assert code == 0
    assert len(recs) == 24
    assert {"121/168", "25/168"} <= {str(d["q"]) for d in recs}


def test_compare_exact_case(capsys):
    code, out, _ = run(capsys, "compare", "o;2|-1;(2,1),(2,1)", "--N", "0", "--r", "3..30", "--output", "json")
    rep = json.loads(out)
    assert code == 0
    assert max(rep["residuals"]) < 1e-9
    assert rep["fitted_order"] == rep["expected_order"] == "inf"
    assert rep["passed"] is True


def test_compare_failure_exit_code(capsys):
    # stationary point 1/31 away from an integer: still pre-asymptotic on this range
    code, out, _ = run(capsys, "compare", "o;0|-1;(3,2),(4,1),(5,3)", "--N", "1", "--r", "50..400")
    assert code == 2
    assert out.rstrip().endswith("FAIL")


def test_compare_csv(capsys):
    code, out, _ = run(capsys, "compare", M_MINUS_1, "--r", "50..60", "--output", "csv")
    assert code == 0
    assert out.splitlines()[0] == "r,re_tau,im_tau,re_approx,im_approx,abs_residual"
    assert len(out.splitlines()) == 12


def test_expand_modes(capsys):
    _, exact, _ = run(capsys, "expand", M_MINUS_1, "--N", "2", "--output", "json")
    _, series, _ = run(capsys, "expand", M_MINUS_1, "--N", "2", "--output", "json", "--eval-mode", "series")
    assert json.loads(exact) != json.loads(series)
    code, pretty, _ = run(capsys, "expand", M_MINUS_1, "--N", "2")
    assert code == 0
    assert pretty.splitlines()[0].split() == ["q", "exponent", "re", "im"]
    assert "121/168" in pretty and "25/168" in pretty


def test_moduli_counts(capsys):
    code, out, _ = run(capsys, "moduli", M_MINUS_1, "--output", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["counts"] == {"I1": 0, "I2a": 1, "I2b": 23}
    assert sum(d["rep_exists"] for d in payload["labels"] if d["set"] == "I2b") == 2


def test_casson(capsys):
    code, out, _ = run(capsys, "casson", M_MINUS_1, "--output", "json")
    assert code == 0
    assert json.loads(out)["lambda_cw"] == "2"
    code, out, _ = run(capsys, "casson", "o;0|0", "--output", "json")
    assert code == 0
    assert json.loads(out)["lambda_clw"] == "-1/12"


def test_casson_failure_exit_code(capsys, monkeypatch):
    from seifert_wrt import analysis
    monkeypatch.setattr(analysis, "trivial_ratio_series", lambda x, order=8: 0j)
    code, _, _ = run(capsys, "casson", M_MINUS_1)
    assert code == 2


def test_vanish_scan(capsys):
    code, out, _ = run(capsys, "vanish-scan", M_MINUS_1, "--output", "json")
    recs = json.loads(out)
    assert code == 0
    assert len(recs) == 21
    assert all(d["max_abs_z1"] < 1e-10 for d in recs)


@pytest.mark.parametrize("argv", [
    ["invariant", "o;0|-1;(2,2)"],
    ["invariant", "garbage"],
    ["invariant", M_MINUS_1, "--r", "1..5"],
    ["invariant", M_MINUS_1, "--precision", "10"],
    ["expand", "n;1|0;(2,1)"],
    ["casson", "o;1|-1;(2,1)"],
])
def test_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == "" and err.startswith("error:")


def test_bad_range_syntax(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["invariant", M_MINUS_1, "--r", "3-5"])
    assert exc.value.code == 2


def test_thread_setting(capsys, monkeypatch):
    _, a, _ = run(capsys, "invariant", M_MINUS_1, "--r", "3..30")
    monkeypatch.setenv("SEIFERT_WRT_THREADS", "1")
    _, b, _ = run(capsys, "invariant", M_MINUS_1, "--r", "3..30")
    assert a == b
    monkeypatch.setenv("SEIFERT_WRT_THREADS", "many")
    code, _, err = run(capsys, "invariant", M_MINUS_1)
    assert code == 1 and "SEIFERT_WRT_THREADS" in err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(depth=-1)
    with pytest.raises(ValueError):
        RunConfig(r_range=(5, 4))
    assert RunConfig(precision_digits=15).dps is None
    assert RunConfig(precision_digits=40).dps == 40


def test_number_formatting():
    assert fmt_float(-0.0) == 0.0 and str(fmt_float(-0.0)) == "0.0"
    assert fmt_float(1 / 3) == 0.33333333333333
    assert fmt_complex(1 + 1e-17j) == (1.0, 0.0)


@pytest.mark.skipif(shutil.which("seifert-wrt") is None, reason="console script not installed")
@pytest.mark.parametrize("argv", [
    ["invariant", M_MINUS_1, "--r", "3..40"],
    ["expand", M_MINUS_1, "--N", "3", "--output", "json"],
    ["cs", "o;0|-2;(2,1),(3,1),(7,1)", "--output", "csv"],
])
def test_byte_identical_runs(argv):
    outs = [subprocess.run(["seifert-wrt", *argv], capture_output=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]
