"""Tests for the command-line surface and the invariant registry."""

import io
import json

import numpy as np
import pytest

from chimera2d import cli, invariants
from chimera2d.cli import RunConfig, ConfigError, cmd_dispatch, read_series_csv, write_series_csv


# ----------------------------------------------------------------------
# configuration handling


def test_config_roundtrip_is_identity():
    cfg = RunConfig(layers=1, state_dim=3, channels=1, steps=7, lr=0.01,
                    horizon=12, phi=(0.4, 0.1), eta=(0.2,), season=4)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown config keys"):
        RunConfig.from_dict({"layars": 2})


def test_nonpositive_values_rejected():
    with pytest.raises(ConfigError):
        RunConfig(horizon=0)
    with pytest.raises(ConfigError):
        RunConfig(lr=-1.0)


def test_config_json_file_roundtrip(tmp_path):
    path = tmp_path / "run.json"
    cfg = RunConfig(steps=3, seed=9)
    path.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.load(str(path)) == cfg


def test_seed_override():
    assert RunConfig.load(None, seed_override=123).seed == 123


# ----------------------------------------------------------------------
# CSV format


def test_csv_roundtrip(tmp_path):
    series = np.random.default_rng(0).standard_normal((3, 7))
    path = tmp_path / "series.csv"
    with open(path, "w") as fh:
        write_series_csv(fh, series)
    assert np.array_equal(read_series_csv(str(path)), series)


def test_csv_header_and_shape():
    buf = io.StringIO()
    write_series_csv(buf, np.zeros((4, 5)))
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "t,var_0,var_1,var_2,var_3"
    assert len(lines) == 6  # header + 5 timesteps


def test_bad_csv_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,value\n0,1\n")
    with pytest.raises(ConfigError):
        read_series_csv(str(path))


# ----------------------------------------------------------------------
# subcommands


def test_generate_deterministic(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"variates": 2, "length": 32, "seed": 5}))
    a, b = tmp_path / "a", tmp_path / "b"
    assert cmd_dispatch(["generate", "--config", str(cfg), "--out", str(a)]) == 0
    assert cmd_dispatch(["generate", "--config", str(cfg), "--out", str(b)]) == 0
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()


def test_fit_forecast_eval_pipeline(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "variates": 2, "length": 24, "phi": [0.5], "noise_std": 0.0, "seed": 1,
        "layers": 1, "state_dim": 2, "channels": 1,
        "steps": 2, "lr": 1e-6, "horizon": 3,
        "data": str(tmp_path / "series.csv"),
    }))
    out = str(tmp_path)
    assert cmd_dispatch(["generate", "--config", str(cfg), "--out", out]) == 0
    assert cmd_dispatch(["fit", "--config", str(cfg), "--out", out]) == 0
    assert (tmp_path / "checkpoint.json").exists()
    assert len(json.loads((tmp_path / "loss_log.json").read_text())) == 2
    assert cmd_dispatch([
        "forecast", "--config", str(cfg), "--out", out,
        "--checkpoint", str(tmp_path / "checkpoint.json"),
    ]) == 0
    forecast = read_series_csv(str(tmp_path / "forecast.csv"))
    assert forecast.shape == (2, 3)  # V variates, H steps
    assert cmd_dispatch([
        "eval", "--pred", str(tmp_path / "forecast.csv"),
        "--truth", str(tmp_path / "forecast.csv"),
        "--insample", str(tmp_path / "series.csv"), "--out", out,
    ]) == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert set(metrics) == {"MSE", "MAE", "SMAPE", "MASE", "OWA"}
    assert metrics["MSE"] == 0.0


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert cmd_dispatch(["generate", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_missing_config_file_exits_2(tmp_path):
    assert cmd_dispatch(["generate", "--config", str(tmp_path / "nope.json")]) == 2


def test_unknown_subcommand_exits_2():
    assert cmd_dispatch(["frobnicate"]) == 2


def test_runtime_failure_exits_1(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    # training diverges at an absurd learning rate -> runtime failure
    cfg.write_text(json.dumps({
        "variates": 1, "length": 32, "noise_std": 0.2, "seed": 2,
        "layers": 1, "state_dim": 2, "channels": 1, "steps": 50, "lr": 100.0,
        "data": str(tmp_path / "series.csv"),
    }))
    out = str(tmp_path)
    assert cmd_dispatch(["generate", "--config", str(cfg), "--out", out]) == 0
    assert cmd_dispatch(["fit", "--config", str(cfg), "--out", out]) == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert err.startswith("error: runtime:")
    assert "\n" not in err


def test_bench_scan_writes_table(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bench_sizes": [16, 32], "state_dim": 2}))
    assert cmd_dispatch(["bench-scan", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
    assert lines[0] == "T,sequential_s,scan_s,wavefront_s"
    assert len(lines) == 3


# ----------------------------------------------------------------------
# invariant registry


def test_registry_matches_manifest():
    declared = {n for group in invariants.MODULE_INVARIANTS.values() for n in group}
    registered = set(invariants.REGISTRY)
    assert declared == registered, (
        f"manifest/registry mismatch: missing={sorted(declared - registered)}, "
        f"unregistered={sorted(registered - declared)}"
    )


def test_every_library_module_declares_invariants():
    modules = {
        "structured", "discretize", "recurrence", "scan", "conv",
        "selective", "model", "variants", "ar", "cli",
    }
    assert set(invariants.MODULE_INVARIANTS) == modules


def test_run_all_reports_each_invariant():
    names = ["structured.companion_nilpotent", "selective.step_monotonicity"]
    results = invariants.run_all(names)
    assert [r.name for r in results] == names
    assert all(r.passed for r in results)


def test_run_all_unknown_name_rejected():
    with pytest.raises(KeyError):
        invariants.run_all(["no.such.invariant"])


def test_selftest_exits_zero(capsys):
    assert cmd_dispatch(["selftest"]) == 0
    out = capsys.readouterr().out
    declared = [n for group in invariants.MODULE_INVARIANTS.values() for n in group]
    for name in declared:
        assert f"PASS {name}" in out
