import json
import os

import pytest

from nlspectral import cli
from nlspectral.errors import ConfigError
from nlspectral.experiments import fit_slope


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


SMALL_STOKES = {
    "experiment": "probe",
    "kernel": {"family": "constant", "dimension": 2, "delta": 0.1},
    "orientation": {"angle": 0.7},
    "bound": 4,
    "decay": 2.0,
    "seed": 3,
}


def test_fit_slope_linear():
    deltas = [0.2, 0.1, 0.05, 0.025]
    errs = [3.0 * d for d in deltas]
    assert fit_slope(deltas, errs) == pytest.approx(1.0, abs=1e-10)


def test_fit_slope_quadratic():
    deltas = [0.2, 0.1, 0.05, 0.025]
    errs = [0.7 * d * d for d in deltas]
    assert fit_slope(deltas, errs) == pytest.approx(2.0, abs=1e-10)


def test_fit_slope_excludes_floor_points():
    deltas = [0.2, 0.1, 0.05, 0.025, 0.0125]
    errs = [3.0 * d for d in deltas[:-1]] + [1e-15]
    assert fit_slope(deltas, errs) == pytest.approx(1.0, abs=1e-10)


def test_fit_slope_needs_three_points():
    with pytest.raises(ConfigError):
        fit_slope([0.1, 0.05], [1.0, 0.5])


def test_cli_success_writes_artifacts(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_STOKES)
    out = tmp_path / "out"
    rc = cli.main(["stokes", "--config", cfg, "--out", str(out)])
    assert rc == 0
    assert (out / "probe.csv").exists()
    summary = json.loads((out / "probe_summary.json").read_text())
    assert all(a["passed"] for a in summary["assertions"].values())
    assert summary["metadata"]["config_sha256"]


def test_cli_determinism_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_STOKES)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["stokes", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["stokes", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "probe.csv").read_bytes() == (out2 / "probe.csv").read_bytes()


def test_cli_malformed_json_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    out = tmp_path / "out"
    rc = cli.main(["stokes", "--config", str(path), "--out", str(out)])
    assert rc == 2
    assert not out.exists() or not any(out.iterdir())


def test_cli_missing_config_exits_2(tmp_path, monkeypatch):
    monkeypatch.delenv("NLSPECTRAL_CONFIG", raising=False)
    rc = cli.main(["stokes", "--out", str(tmp_path)])
    assert rc == 2


def test_cli_invalid_schema_exits_2(tmp_path):
    cfg = write_cfg(tmp_path, {"kernel": {"family": "constant", "dimension": 2,
                                          "delta": 0.1}, "bound": 1})
    rc = cli.main(["stokes", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 2


def test_cli_increasing_deltas_rejected(tmp_path):
    cfg = write_cfg(tmp_path, {
        "system": "stokes",
        "kernel": {"family": "constant", "dimension": 2},
        "deltas": [0.05, 0.1, 0.2, 0.4],
        "bound": 4,
    })
    rc = cli.main(["convergence", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 2


def test_cli_quadrature_failure_exits_3(tmp_path):
    cfg = write_cfg(tmp_path, dict(SMALL_STOKES, tolerances={"quad.tol": 1e-18}))
    rc = cli.main(["stokes", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 3


def test_cli_seed_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_STOKES)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["stokes", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["stokes", "--config", cfg, "--out", str(out2),
                     "--seed", "99"]) == 0
    assert (out1 / "probe.csv").read_bytes() != (out2 / "probe.csv").read_bytes()


def test_cli_env_overrides(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, SMALL_STOKES)
    ref, out = tmp_path / "ref", tmp_path / "env"
    assert cli.main(["stokes", "--config", cfg, "--out", str(ref), "--seed", "99"]) == 0
    monkeypatch.setenv("NLSPECTRAL_CONFIG", cfg)
    monkeypatch.setenv("NLSPECTRAL_OUT", str(out))
    monkeypatch.setenv("NLSPECTRAL_SEED", "99")
    assert cli.main(["stokes"]) == 0
    assert (out / "probe.csv").read_bytes() == (ref / "probe.csv").read_bytes()


def test_cli_tol_override_parsing(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_STOKES)
    rc = cli.main(["stokes", "--config", cfg, "--out", str(tmp_path / "o"),
                   "--tol-override", "quad.tol=banana"])
    assert rc == 2


def test_preset_files_are_valid_json():
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    presets = sorted(p for p in os.listdir(os.path.join(here, "presets"))
                     if p.endswith(".json"))
    assert len(presets) == 12
    for name in presets:
        with open(os.path.join(here, "presets", name)) as fh:
            json.load(fh)


def test_cli_panel_override_functional(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_STOKES)
    rc = cli.main(["stokes", "--config", cfg, "--out", str(tmp_path / "o"),
                   "--tol-override", "quad.panels=2"])
    assert rc == 0


def test_cli_trajectory_subcommands(tmp_path):
    base = {
        "kernel": {"family": "constant", "dimension": 2, "delta": 0.1},
        "orientation": {"angle": 0.7},
        "bound": 4,
        "decay": 2.0,
        "seed": 5,
        "times": {"t1": 0.2, "steps": 4},
    }
    cfg = write_cfg(tmp_path, dict(base, experiment="st"))
    out = tmp_path / "o1"
    assert cli.main(["stokes-evolve", "--config", cfg, "--out", str(out)]) == 0
    header = (out / "st.csv").read_text().splitlines()[0]
    assert header == "t,l2_norm,energy,err_vs_local"
    cfg2 = write_cfg(tmp_path, dict(base, experiment="nv", lame=[1.0, 1.0]),
                     name="cfg2.json")
    out2 = tmp_path / "o2"
    assert cli.main(["navier-evolve", "--config", cfg2, "--out", str(out2)]) == 0
    assert (out2 / "nv.csv").read_text().splitlines()[0] == "t,l2_norm,energy"


def test_cli_energy1d_and_helmholtz_smoke(tmp_path):
    cfg = write_cfg(tmp_path, {
        "experiment": "dbl",
        "checks": ["double"],
        "pairs": [[0.2, 0.05]],
        "ximax": 16,
    })
    assert cli.main(["energy-1d", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    cfg2 = write_cfg(tmp_path, {
        "experiment": "hh",
        "seed": 2,
        "case2d": {"kernel": {"family": "constant", "dimension": 2, "delta": 0.1},
                   "orientation": {"angle": 0.3}, "bound": 4},
    }, name="cfg2.json")
    assert cli.main(["helmholtz", "--config", cfg2, "--out", str(tmp_path / "b")]) == 0


def test_cli_symbols_cache_files(tmp_path):
    cfg = write_cfg(tmp_path, {
        "experiment": "sweep",
        "kernels": [{"family": "constant", "dimension": 2}],
        "angles": [0.0, 1.5707963267948966],
        "deltas": [0.2, 0.1],
        "bound": 4,
        "cache": True,
    })
    out = tmp_path / "o"
    assert cli.main(["symbols", "--config", cfg, "--out", str(out)]) == 0
    caches = sorted(out.glob("cache_*.txt"))
    assert len(caches) == 4
    from nlspectral.symbols import load_table
    back = load_table(caches[0])
    assert back.bound == 4
