import io
import json
import math
from pathlib import Path

import pytest

from circquad.cli import hermite_compare, main, make_config, parse_angle
from circquad.errors import ConfigError, DerivativeUnavailable

ROOT = Path(__file__).resolve().parents[1]


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_angle():
    assert parse_angle("5*pi/6") == pytest.approx(5 * math.pi / 6)
    assert parse_angle("-pi/6") == pytest.approx(-math.pi / 6)
    assert parse_angle(0) == 0.0
    with pytest.raises(ConfigError):
        parse_angle("__import__('os')")


def test_config_validation():
    with pytest.raises(ConfigError):
        make_config({"q": 0.5, "N": 10, "m": 11})
    with pytest.raises(ConfigError):
        make_config({"q": 0.5, "N": 10, "m": 6, "r": 5})
    with pytest.raises(ConfigError):
        make_config({"q": 0.5, "N": 10, "colour": 1})


def test_mtable_examples():
    code, out, _ = run("mtable", "--q-list", "0.1", "0.5", "0.95", "--N-list", "5", "25", "40")
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()]
    assert rows[0] == ["q", "5", "25", "40"]
    assert rows[1][1] == "5" and rows[2][2] == "24" and rows[3][3] == "20"


def test_nodes_examples(tmp_path):
    code, out, _ = run("nodes", "--q", "0.9", "--N", "15", "--theta0", "0")
    assert code == 0 and out.count(",selected,") == 8
    csv_path = tmp_path / "fig3a.csv"
    code, _, _ = run("nodes", "--q", "0.7", "--N", "14", "--m", "6", "--theta0", "0", "--out", str(csv_path))
    assert code == 0
    assert csv_path.read_text().count(",subpartition,") == 4
    assert csv_path.with_suffix(".svg").read_text().startswith("<svg")


def test_weights_col4():
    code, out, _ = run("weights", "--q", "0.95", "--N", "9", "--theta0", "4*pi/3", "--rule", "uniform")
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()[1:]]
    re_ = [float(r[1]) for r in rows]
    assert all(abs(float(r[2])) < 1e-14 for r in rows)
    assert sum(abs(x + 0.001396324209739) < 1e-12 for x in re_) == 2
    assert abs(sum(re_) - 1) < 1e-10


@pytest.mark.parametrize("rule", ["uniform", "closed", "mimic"])
def test_weights_sum_to_one(rule):
    code, out, _ = run("weights", "--q", "0.85", "--N", "15", "--theta0", "5*pi/6", "--m", "9", "--rule", rule)
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()[1:]]
    assert abs(sum(complex(float(r[1]), float(r[2])) for r in rows) - 1) < 1e-10


def test_integrate_examples():
    code, out, _ = run("integrate", "--q", "0.7", "--N", "30", "--m", "26", "--theta0", "5*pi/6",
                       "--integrand", "exp", "--weighting", "none")
    rep = json.loads(out)
    assert code == 0 and rep["error1"] < 1e-13 and rep["error3"] < 1e-13
    code, out, _ = run("integrate", "--q", "0.5", "--N", "24", "--m", "10", "--theta0", "7*pi/6",
                       "--r", "14", "--integrand", "step", "--weighting", "none")
    assert abs(json.loads(out)["error3"] - 0.013642381379640) < 1e-5


def test_integrate_constant_is_exact():
    code, out, _ = run("integrate", "--q", "0.8", "--N", "20", "--integrand", "one")
    rep = json.loads(out)
    assert code == 0
    assert max(rep["error1"], rep["error2"], rep["error3"] or 0.0) < 1e-12


def test_hermite_compare():
    code, out, _ = run("hermite-compare", "--q", "0.5", "--N", "30", "--m", "15", "--r", "19",
                       "--theta0", "0", "--integrand", "exp_half", "--seed", "0")
    rep = json.loads(out)
    assert code == 0 and rep["hermite_err"] < rep["lagrange_err"]
    same = hermite_compare(make_config({"q": 0.5, "N": 30, "m": 15, "r": 15, "integrand": "exp_half"}))
    assert same["hermite_err"] == same["lagrange_err"]


def test_hermite_compare_step_fails_validation():
    with pytest.raises(DerivativeUnavailable):
        hermite_compare(make_config({"q": 0.5, "N": 20, "m": 8, "r": 10, "integrand": "step"}))
    code, _, err = run("hermite-compare", "--q", "0.5", "--N", "20", "--m", "8", "--r", "10",
                       "--integrand", "step")
    assert code == 2 and "derivatives" in err


def test_exit_codes(tmp_path):
    assert run("integrate", "--q", "1.5", "--N", "10")[0] == 2
    assert run("nodes", "--q", "0.5", "--N", "10", "--m", "11")[0] == 2
    assert run("bogus")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "q": 0.5,\n  "N": 10,,\n}\n')
    code, _, err = run("integrate", str(bad))
    assert code == 2 and ":3:" in err


def test_numerical_failure_exit_code(monkeypatch):
    from circquad import cli
    from circquad.errors import ZeroFindingError

    def boom(*a, **k):
        raise ZeroFindingError("no")
    monkeypatch.setattr(cli.paraorth, "configure", boom)
    assert run("integrate", "--q", "0.5", "--N", "10")[0] == 3


def test_reproduce_all_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("reproduce-all", "--experiments", str(ROOT / "experiments"), "--out-dir", str(a))[0] == 0
    assert run("reproduce-all", "--experiments", str(ROOT / "experiments"), "--out-dir", str(b))[0] == 0
    files = sorted(p.name for p in a.iterdir())
    assert "table1_mtable.csv" in files and "table4_integrate.csv" in files
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_r_selection_switch():
    base = ["nodes", "--q", "0.5", "--N", "20", "--m", "8", "--theta0", "0"]
    code, out, _ = run(*base, "--r-selection", "max_card_under_k_threshold", "--k-threshold", "1.0")
    assert code == 0 and out.count(",subpartition,") == 5
    code, _, err = run(*base, "--r-selection", "nope")
    assert code == 2
    with pytest.raises(ConfigError):
        make_config({"q": 0.5, "N": 10, "r_selection": "nope"})
