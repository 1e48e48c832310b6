"""Command-line interface: subcommands, outputs, and exit codes."""

import numpy as np
import pytest

import risray.cli as cli
from risray.kernels.backend import BackendError
from risray.ris import load_ris_config
from risray.sweep import read_grid_csv

SMALL_GRID = "1.2,1.3,0.2,0.3,0.114,0.02"


def run(*argv):
    return cli.main(list(argv))


# --------------------------------------------------------------------------
# subcommand happy paths


def test_optimize_writes_loadable_config(tmp_path, capsys):
    assert run("optimize", "--scene", "anechoic", "--out", str(tmp_path)) == 0
    out = capsys.readouterr().out
    assert "-55.722 dBm optimized" in out
    assert "66/127 elements active" in out
    gammas = load_ris_config(tmp_path / "ris_config.txt")
    assert len(gammas) == 127
    assert int(np.count_nonzero(np.abs(gammas) > 0)) == 66


def test_sweep_default_grid_outputs(tmp_path, capsys):
    assert run("optimize", "--scene", "anechoic", "--out", str(tmp_path)) == 0
    capsys.readouterr()
    code = run(
        "sweep",
        "--scene", "anechoic",
        "--ris-config", str(tmp_path / "ris_config.txt"),
        "--out", str(tmp_path),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "5551 points" in out
    assert "K=0, scalar mode" in out
    xs, ys, values = read_grid_csv(tmp_path / "power_grid.csv")
    assert values.shape == (91, 61)
    assert values.max() == pytest.approx(-55.46535267964878, abs=1e-5)
    ppm = (tmp_path / "heatmap.ppm").read_bytes()
    assert ppm.startswith(b"P6\n# risray heatmap v1\n61 91\n255\n")


def test_sweep_grid_override_and_path_dump(tmp_path, capsys):
    code = run(
        "sweep",
        "--scene", "table1_reflective",
        "--grid", SMALL_GRID,
        "--max-order", "1",
        "--mode", "scalar",
        "--threads", "2",
        "--dump-paths",
        "--out", str(tmp_path),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "36 points" in out
    assert "K=1, scalar mode" in out
    dump = (tmp_path / "paths.txt").read_text().splitlines()
    assert dump[0] == "# risray paths v1"
    xs, ys, values = read_grid_csv(tmp_path / "power_grid.csv")
    assert values.shape == (6, 6)


def test_paths_subcommand(tmp_path, capsys):
    code = run(
        "paths",
        "--scene", "anechoic",
        "--rx", "1.32,0.23,0.114",
        "--out", str(tmp_path),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "127 paths (0 with bounces)" in out
    lines = (tmp_path / "paths.txt").read_text().splitlines()
    assert lines[0] == "# risray paths v1"
    assert sum(1 for ln in lines if not ln.startswith("#")) == 127


def test_validate_passes_on_anechoic(tmp_path, capsys):
    assert run("validate", "--scene", "anechoic", "--out", str(tmp_path)) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "20 configurations x 50 points" in out


# --------------------------------------------------------------------------
# exit codes


def test_usage_errors_exit_1(capsys):
    assert run() == 1
    assert run("frobnicate") == 1
    assert run("sweep") == 1
    assert run("sweep", "--scene", "anechoic", "--mode", "tensor") == 1
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert run("--help") == 0
    assert run("sweep", "--help") == 0
    capsys.readouterr()


def test_config_errors_exit_2(tmp_path, capsys):
    assert run("sweep", "--scene", "missing.yaml", "--out", str(tmp_path)) == 2
    assert (
        run("sweep", "--scene", "anechoic", "--grid", "1,2,3", "--out", str(tmp_path))
        == 2
    )
    assert run("validate", "--scene", "table1_reflective", "--out", str(tmp_path)) == 2
    assert (
        run("paths", "--scene", "anechoic", "--rx", "1.0,oops,0.1",
            "--out", str(tmp_path))
        == 2
    )
    err = capsys.readouterr().err
    assert "missing.yaml" in err


def test_short_ris_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "short.txt"
    bad.write_text("# risray ris-config v1\n0 1.25 0\n1 0 0\n")
    code = run(
        "sweep",
        "--scene", "anechoic",
        "--ris-config", str(bad),
        "--grid", SMALL_GRID,
        "--out", str(tmp_path),
    )
    assert code == 2
    assert "short.txt" in capsys.readouterr().err


def test_runtime_failures_exit_3(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "sweep_grid", boom)
    code = run("sweep", "--scene", "anechoic", "--grid", SMALL_GRID,
               "--out", str(tmp_path))
    assert code == 3
    assert "disk on fire" in capsys.readouterr().err

    def no_backend(*a, **k):
        raise BackendError("backend unavailable")

    monkeypatch.setattr(cli, "sweep_grid", no_backend)
    code = run("sweep", "--scene", "anechoic", "--grid", SMALL_GRID,
               "--out", str(tmp_path))
    assert code == 3
    capsys.readouterr()


def test_validate_failure_exits_3(tmp_path, capsys, monkeypatch):
    import risray.cli as module

    real = module.free_space_panel_field

    def skewed(**kwargs):
        return real(**kwargs) * 1.01

    monkeypatch.setattr(module, "free_space_panel_field", skewed)
    assert run("validate", "--scene", "anechoic", "--out", str(tmp_path)) == 3
    assert "FAIL" in capsys.readouterr().out
