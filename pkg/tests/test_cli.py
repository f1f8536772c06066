import json

import pytest

from d4eigen.cli import CACHE_ENV, main, parse_grid


def run(capsysbinary, *argv):
    code = main(list(argv))
    return code, capsysbinary.readouterr().out


def test_series_json(capsysbinary):
    code, out = run(capsysbinary, "series", "phi", "--order", "16")
    assert code == 0
    assert json.loads(out)["terms"][3] == ["1", "-98028"]


def test_series_csv(capsysbinary):
    code, out = run(capsysbinary, "series", "delta", "--order", "24", "--format", "csv")
    assert code == 0
    assert out.splitlines()[:3] == [b"q_exp,coeff", b"1,1", b"2,-24"]


def test_identities(capsysbinary):
    code, out = run(capsysbinary, "identities", "--order", "80")
    assert code == 0 and set(json.loads(out).values()) == {"zero"}


def test_transforms_are_reproducible(capsysbinary):
    args = ("transforms", "--points", "2", "--digits", "40", "--seed", "11")
    a, b = run(capsysbinary, *args), run(capsysbinary, *args)
    assert a == b and a[0] == 0
    assert json.loads(a[1])["seed"] == 11


def test_fplus_at_origin(capsysbinary):
    code, out = run(capsysbinary, "fplus", "--r", "0", "--digits", "30")
    assert code == 0
    assert json.loads(out) == [{"r": "0.0", "value": "0.0", "err": "0.0"}]


def test_fminus_grid_csv(capsysbinary):
    code, out = run(capsysbinary, "fminus", "--grid", "1:2:1/2", "--digits", "30", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 4


def test_eval_phi(capsysbinary):
    code, out = run(capsysbinary, "eval", "phi", "--t", "1", "--digits", "30")
    assert code == 0 and float(json.loads(out)[0]["err"]) < 1e-25


@pytest.mark.parametrize("argv", [
    ("series", "nope"),
    ("fminus", "--r", "0"),
    ("fplus", "--grid", "2:1:1"),
    ("fplus", "--r", "1", "--digits", "10"),
    ("selftest", "--criteria", "0-3"),
    ("bogus",),
])
def test_usage_errors(capsysbinary, argv):
    assert main(list(argv)) == 2


def test_failed_check_exits_one(capsysbinary):
    # R = 4 leaves a tail far above 1e-12
    code, out = run(capsysbinary, "poisson", "--rmax", "4", "--tol", "1e-12", "--digits", "30")
    assert code == 1 and json.loads(out)["pass"] is False


def test_cache_dir_and_env(tmp_path, monkeypatch, capsysbinary):
    first = run(capsysbinary, "series", "psi", "--order", "64", "--cache-dir", str(tmp_path))
    assert (tmp_path / "psi-64.qs").exists()
    env = tmp_path / "env"
    env.mkdir()
    monkeypatch.setenv(CACHE_ENV, str(env))
    second = run(capsysbinary, "series", "psi", "--order", "64")
    assert (env / "psi-64.qs").exists()
    third = run(capsysbinary, "series", "psi", "--order", "64")  # served from cache
    assert first == second == third


def test_selftest_subset_is_byte_identical(capsysbinary):
    a = run(capsysbinary, "selftest", "--criteria", "1-3")
    b = run(capsysbinary, "selftest", "--criteria", "1-3")
    assert a == b and a[0] == 0


def test_parse_grid():
    assert [str(x) for x in parse_grid("1/4:1:1/4")] == ["1/4", "1/2", "3/4", "1"]
