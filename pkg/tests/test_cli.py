import json
import math
import os

import pytest

from diffnev.catalog import specs as S
from diffnev.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, ConfigError, load_config, main, resolve_shift
from diffnev.io import dumps_json, fmt_float
from diffnev.suite import config_path, run_suite, tree_digest


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def _load(path):
    return json.loads(path.read_text())


def test_verify_sn_pair_theorem(tmp_path):
    out = tmp_path / "v"
    assert main(["verify", str(config_path("sn")), "--theorem", "thm2nd2", "--out", str(out)]) == EXIT_OK
    assert _load(out / "verify_thm2nd2.json")["verdict"] == "holds"
    manifest = _load(out / "manifest.json")
    assert manifest["complete"] and manifest["exit_code"] == 0
    assert [f["path"] for f in manifest["files"]] == ["verify_thm2nd2.json"]


def test_confine_offset_two_constant(tmp_path):
    out = tmp_path / "c"
    assert main(["confine", "--case", "case1", "--k", "1", "--delta", "+1", "--out", str(out)]) == EXIT_OK
    trace = _load(out / "trace_case1_d+1_k1.json")
    row = next(o for o in trace["offsets"] if o["offset"] == 2)
    assert row["valuation"] == 0 and row["coefficients"][0] == "-a2 - 1"
    assert trace["satisfies_equation"] is True


def test_short_grid_is_config_error(tmp_path):
    cfg = _load(config_path("exp"))
    cfg["r_grid"]["count"] = 4
    p = _write(tmp_path, "bad.json", cfg)
    assert main(["nev", str(p), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


@pytest.mark.parametrize("mutate", [
    lambda c: c.update(unknown_key=1),
    lambda c: c.update(c="3Q"),
    lambda c: c.update(slack_fraction=0.9),
    lambda c: c["r_grid"].update(max=5.0),
    lambda c: c.update(tolerances={"quadrature": {"no_such_field": 1}}),
])
def test_invalid_configs(tmp_path, mutate):
    cfg = _load(config_path("exp"))
    mutate(cfg)
    p = _write(tmp_path, "bad.json", cfg)
    assert main(["nev", str(p), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["nev", str(tmp_path / "absent.json")]) == EXIT_CONFIG
    assert main(["verify"]) == EXIT_CONFIG


def test_periodic_shift_reported_in_manifest(tmp_path):
    cfg = {"function": {"type": "weierstrass_p"}, "c": "2w1", "targets": [1.0],
           "r_grid": {"min": 5, "max": 10, "count": 8}}
    out = tmp_path / "o"
    assert main(["pairs", str(_write(tmp_path, "p.json", cfg)), "--out", str(out)]) == EXIT_CONFIG
    manifest = _load(out / "manifest.json")
    assert not manifest["complete"] and "PeriodicFunctionError" in manifest["notes"][0]


def test_failed_verification_exit_code(tmp_path):
    # exp(exp z) has infinite order: every 0-, 1- and pole-point is paired, so the right side stays near 0
    cfg = {"function": {"type": "exp_exp"}, "c": "log2", "targets": [0.0, 1.0],
           "r_grid": {"min": 2.0, "max": 6.0, "count": 8}, "theorems": ["thm2nd2"]}
    out = tmp_path / "o"
    assert main(["verify", str(_write(tmp_path, "e.json", cfg)), "--out", str(out)]) == EXIT_FAILED
    assert _load(out / "verify_thm2nd2.json")["verdict"] == "fails"
    assert _load(out / "manifest.json")["complete"]


def test_shift_units():
    sn = S.JacobiSN(0.5)
    K = resolve_shift("K", sn).real
    assert resolve_shift("2K", sn) == pytest.approx(2 * K)
    assert resolve_shift("-0.5K", sn) == pytest.approx(-0.5 * K)
    assert resolve_shift("log2", None) == pytest.approx(math.log(2))
    assert resolve_shift("2w2", S.p_plus_exp()) == pytest.approx(2j)
    assert resolve_shift([1, 2], None) == 1 + 2j
    with pytest.raises(ConfigError):
        resolve_shift("2K", S.ExpLinear(1))


def test_bundled_configs_validate():
    for name in ("exp", "sn", "sn_values", "sn_share", "p_plus_exp", "exp_exp", "confine"):
        load_config(config_path(name))


def test_float_format_round_trips():
    for x in (0.1, 1 / 3, -2.5e-300, 6.02214076e23, 0.0):
        s = fmt_float(x)
        assert float(s) == x and "e" in s
    assert fmt_float(math.inf) == "inf" and fmt_float(math.nan) == "nan"
    assert json.loads(dumps_json({"z": complex(1, -2)})) == {"z": [1.0, -2.0]}


def test_thread_override(tmp_path, monkeypatch):
    monkeypatch.setenv("DIFFNEV_THREADS", "1")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        monkeypatch.setenv(var, "4")      # restored after the test
    assert main(["catalog", "--out", str(tmp_path / "o")]) == EXIT_OK
    assert os.environ["OMP_NUM_THREADS"] == "1"


def test_repeat_run_identical(tmp_path):
    entries = [("nev", "exp"), ("share", "sn_share"), ("catalog", "p_plus_exp")]
    assert set(run_suite(tmp_path / "a", entries).values()) == {0}
    assert set(run_suite(tmp_path / "b", entries).values()) == {0}
    assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")
