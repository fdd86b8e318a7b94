import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qrtomo.experiments import (
    ConfigError,
    config_echo,
    emit_results,
    load_config,
    run_memory_sweep,
    run_spectral_sweep,
    run_tomography,
)

_BASE = {
    "task": {"kind": "delayed", "delays": [1]},
    "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 10.0, "multiplexity": 2},
    "stream": {"washout": 5, "train": 40, "eval": 10, "seeds": [0, 1]},
}


def _cfg(**overrides):
    raw = json.loads(json.dumps(_BASE))
    for key, value in overrides.items():
        if isinstance(value, dict) and key in raw:
            raw[key].update(value)
        else:
            raw[key] = value
    return raw


def test_load_config_happy_path(tmp_path):
    cfg = load_config(_cfg())
    assert cfg.reservoir.n_m == 2 and cfg.stream.evaluate == 10
    assert cfg.stream.seeds == (0, 1) and cfg.task.kind == "delayed"
    assert cfg.d_max == 10 and cfg.spectral_samples == 100
    # file form
    path = tmp_path / "c.json"
    path.write_text(json.dumps(_cfg()))
    assert config_echo(load_config(path)) == config_echo(cfg)


def test_load_config_rejects_unknown_keys():
    with pytest.raises(ConfigError) as err:
        load_config(_cfg(bogus=1))
    assert err.value.field == "config.bogus"
    with pytest.raises(ConfigError, match="reservoir.n_q"):
        load_config(_cfg(reservoir={"n_q": 3}))
    with pytest.raises(ConfigError, match="stream.evaluate"):
        load_config(_cfg(stream={"evaluate": 5}))  # only the "eval" alias exists
    with pytest.raises(ConfigError, match="task"):
        load_config(_cfg(task={"kind": "nope", "delays": [1]}))


def test_load_config_validation():
    with pytest.raises(ConfigError, match="non-empty"):
        load_config(_cfg(stream={"seeds": []}))
    with pytest.raises(ConfigError, match="ridge"):
        load_config(_cfg(ridge=-1.0))
    with pytest.raises(ConfigError, match="sweep.ridge"):
        load_config(_cfg(sweep={"ridge": [1, 2]}))
    with pytest.raises(ConfigError, match="sweep.tau_b"):
        load_config(_cfg(sweep={"tau_b": []}))
    with pytest.raises(ConfigError, match="top level"):
        load_config([1, 2])
    cfg = load_config(_cfg(sweep={"tau_b": [1.0, 2.0]},
                           memory={"d_max": 4}, spectral={"samples": 7}))
    assert cfg.sweep == {"tau_b": [1.0, 2.0]}
    assert cfg.d_max == 4 and cfg.spectral_samples == 7


def test_run_tomography_small():
    out = run_tomography(load_config(_cfg()))
    assert len(out.runs) == 2 and not out.baseline
    for run in out.runs:
        assert run.fidelities.shape == (10,)
        assert 0.0 <= run.rmsf <= 1.0
        assert run.error == pytest.approx(1.0 - run.rmsf)
        assert run.eval_start == 45
        assert run.negativity_target is None
    assert out.error_mean == pytest.approx(
        np.mean([r.error for r in out.runs]), abs=1e-15)


def test_run_tomography_deterministic():
    a = run_tomography(load_config(_cfg()))
    b = run_tomography(load_config(_cfg()))
    for ra, rb in zip(a.runs, b.runs):
        assert np.array_equal(ra.fidelities, rb.fidelities)


def test_run_tomography_baseline_differs():
    res = run_tomography(load_config(_cfg()))
    base = run_tomography(load_config(_cfg()), baseline=True)
    assert base.baseline
    assert not np.array_equal(res.runs[0].fidelities, base.runs[0].fidelities)


def test_run_tomography_entangler_draws_params():
    raw = _cfg(task={"kind": "entangler", "delays": [0, 1]})
    out = run_tomography(load_config(raw))
    for run in out.runs:
        assert run.entangler is not None
        assert -0.5 <= run.entangler.h12 <= 0.5
        assert run.negativity_target.shape == (10,)
        assert run.negativity_pred.shape == (10,)
    # distinct seeds draw distinct unitaries
    assert out.runs[0].entangler != out.runs[1].entangler


def test_run_tomography_validation():
    with pytest.raises(ConfigError, match="task"):
        run_tomography(load_config({k: v for k, v in _cfg().items() if k != "task"}))
    with pytest.raises(ConfigError, match="washout"):
        run_tomography(load_config(_cfg(task={"kind": "delayed", "delays": [9]})))
    with pytest.raises(ConfigError, match="n_e"):
        run_tomography(load_config(_cfg(
            task={"kind": "quantum_switch", "delays": [1, 2]},
            reservoir={"n_e": 2})))


def test_run_memory_sweep_smoke():
    raw = {
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 2.0},
        "stream": {"washout": 10, "train": 60, "eval": 12, "seeds": [0, 1]},
        "memory": {"d_max": 2},
        "sweep": {"tau_b": [1.0, 4.0]},
    }
    out = run_memory_sweep(load_config(raw))
    assert len(out) == 2
    for pt in out:
        assert pt.r2_mean.shape == (3,)
        assert np.all((pt.r2_mean >= 0.0) & (pt.r2_mean <= 1.0))
        assert pt.qmc_mean == pytest.approx(np.mean([p.qmc for p in pt.profiles]))
    assert out[0].grid == {"tau_b": 1.0} and out[1].grid == {"tau_b": 4.0}
    with pytest.raises(ConfigError, match="washout"):
        run_memory_sweep(load_config(_cfg(memory={"d_max": 8})))


def test_run_spectral_sweep_smoke():
    raw = {
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 2.0},
        "stream": {"seeds": [3]},
        "spectral": {"samples": 5},
        "sweep": {"tau_b": [0.5, 8.0]},
    }
    out = run_spectral_sweep(load_config(raw))
    assert len(out) == 2
    for pt in out:
        assert pt.inv_lambda2_median >= 1.0 - 1e-12
        assert 0.0 < pt.ratio_mean_median <= 1.0
    rerun = run_spectral_sweep(load_config(raw))
    assert rerun[0].inv_lambda2_median == out[0].inv_lambda2_median
    with pytest.raises(ConfigError, match="samples"):
        run_spectral_sweep(load_config(_cfg(spectral={"samples": 0})))


def test_emit_tomography_csv(tmp_path):
    out = run_tomography(load_config(_cfg()))
    path = tmp_path / "run.csv"
    emit_results(out, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["seed", "step", "fidelity"]
    assert len(rows) == 1 + 2 * 10
    assert rows[1][0] == "0" and rows[1][1] == "45"
    sidecar = json.loads((tmp_path / "run.json").read_text())
    assert set(sidecar) == {"version", "seeds", "config", "summary"}
    assert sidecar["seeds"] == [0, 1]
    assert sidecar["config"]["reservoir"]["n_m"] == 2
    assert len(sidecar["summary"]["per_seed"]) == 2


def test_emit_results_byte_identical_rerun(tmp_path):
    blobs = []
    for name in ("a.csv", "b.csv"):
        out = run_tomography(load_config(_cfg()))
        path = tmp_path / name
        emit_results(out, path)
        blobs.append(path.read_bytes() + path.with_suffix(".json").read_bytes())
    assert blobs[0] == blobs[1]


def test_emit_entangler_csv_has_negativity(tmp_path):
    out = run_tomography(load_config(_cfg(task={"kind": "entangler", "delays": [0, 1]})))
    path = tmp_path / "ent.csv"
    emit_results(out, path)
    with open(path) as fh:
        header = next(csv.reader(fh))
    assert header == ["seed", "step", "fidelity", "negativity_target", "negativity_pred"]


def test_emit_sweep_csvs(tmp_path):
    raw = {
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 2.0},
        "stream": {"washout": 5, "train": 40, "eval": 10, "seeds": [0]},
        "memory": {"d_max": 2},
        "sweep": {"tau_b": [1.0, 4.0]},
    }
    mem_path = tmp_path / "mem.csv"
    emit_results(run_memory_sweep(load_config(raw)), mem_path)
    with open(mem_path) as fh:
        header = next(csv.reader(fh))
    assert header[:3] == ["tau_b", "qmc_mean", "qmc_sd"]
    assert "r2_d0_mean" in header and "r2_d2_sd" in header

    spec_path = tmp_path / "spec.csv"
    raw = {
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 2.0},
        "stream": {"seeds": [3]},
        "spectral": {"samples": 3},
        "sweep": {"tau_b": [0.5, 8.0]},
    }
    emit_results(run_spectral_sweep(load_config(raw)), spec_path)
    with open(spec_path) as fh:
        header = next(csv.reader(fh))
    assert header == ["tau_b", "inv_lambda2_median", "inv_lambda2_mean",
                      "inv_lambda2_sd", "ratio_mean_median", "ratio_mean_mean",
                      "ratio_mean_sd"]


def test_emit_results_errors(tmp_path):
    out = run_tomography(load_config(_cfg()))
    with pytest.raises(OSError, match="does not exist"):
        emit_results(out, tmp_path / "missing" / "x.csv")
    with pytest.raises(TypeError, match="cannot emit"):
        emit_results({"not": "results"}, tmp_path / "y.csv")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "qrtomo", *args],
                          capture_output=True, text=True)


def test_cli_tomography_roundtrip(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(_cfg()))
    out_path = tmp_path / "out.csv"
    proc = _cli("tomography", "--config", str(cfg_path), "--out", str(out_path))
    assert proc.returncode == 0, proc.stderr
    assert "error =" in proc.stdout and str(out_path) in proc.stdout
    assert out_path.exists() and out_path.with_suffix(".json").exists()
    # rerun is byte-identical (CSV and sidecar)
    blob = out_path.read_bytes()
    _cli("tomography", "--config", str(cfg_path), "--out", str(out_path))
    assert out_path.read_bytes() == blob


def test_cli_seed_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(_cfg()))
    out_path = tmp_path / "out.csv"
    proc = _cli("tomography", "--config", str(cfg_path), "--out", str(out_path),
                "--seed", "5")
    assert proc.returncode == 0
    sidecar = json.loads(out_path.with_suffix(".json").read_text())
    assert sidecar["seeds"] == [5]


def test_cli_validation_failures(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(_cfg(bogus=1)))
    proc = _cli("tomography", "--config", str(cfg_path), "--out",
                str(tmp_path / "o.csv"))
    assert proc.returncode == 1
    assert "config error" in proc.stderr
    # subcommand / task kind mismatch
    cfg_path.write_text(json.dumps(_cfg()))
    proc = _cli("switch", "--config", str(cfg_path), "--out", str(tmp_path / "o.csv"))
    assert proc.returncode == 1 and "quantum_switch" in proc.stderr
    # missing output path
    proc = _cli("tomography", "--config", str(cfg_path))
    assert proc.returncode == 1 and "output_path" in proc.stderr


def test_cli_runtime_failure_exit_2(tmp_path):
    # bell targets with baseline features: imaginary feature columns are all
    # zero, so the ridge-free normal matrix is singular -> runtime error
    raw = {
        "task": {"kind": "bell_creator", "delays": [0, 1]},
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 10.0},
        "stream": {"washout": 2, "train": 30, "eval": 6, "seeds": [0]},
        "ridge": 0.0,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(raw))
    proc = _cli("bell", "--config", str(cfg_path), "--out", str(tmp_path / "o.csv"),
                "--baseline")
    assert proc.returncode == 2
    assert "singular" in proc.stderr


def test_cli_memory_and_spectral(tmp_path):
    raw = {
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 2.0},
        "stream": {"washout": 10, "train": 60, "eval": 12, "seeds": [0]},
        "memory": {"d_max": 2},
        "output_path": str(tmp_path / "mem.csv"),
    }
    cfg_path = tmp_path / "mem.json"
    cfg_path.write_text(json.dumps(raw))
    proc = _cli("memory", "--config", str(cfg_path))
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "mem.csv").exists()

    raw = {
        "reservoir": {"n_m": 2, "n_e": 1, "tau_b": 2.0},
        "stream": {"seeds": [3]},
        "spectral": {"samples": 3},
    }
    cfg_path.write_text(json.dumps(raw))
    proc = _cli("spectral", "--config", str(cfg_path), "--out",
                str(tmp_path / "spec.csv"))
    assert proc.returncode == 0, proc.stderr
    assert "1 grid points" in proc.stdout
