import math
import os

import numpy as np
import pytest

from qillum.cli import build_config, load_config_file, main, parse_float_grid, parse_int_list
from qillum.presets import (
    PRESET_NAMES,
    RunConfig,
    Workspace,
    default_t_grid,
    engineered_probe,
    preset_files,
    run_preset,
    sweep,
)

SMALL = dict(n_max=10, env_cutoff=10)


def small_config(**overrides) -> RunConfig:
    cfg = RunConfig(**SMALL)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def read_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.strip().split(",")] for line in fh if line.strip()]
    return header, rows


# --- argument and config parsing ------------------------------------------------

def test_parse_float_grid_forms():
    assert parse_float_grid("0.1,0.2,0.3") == [0.1, 0.2, 0.3]
    assert parse_float_grid("0:0.5:3") == [0.0, 0.25, 0.5]
    with pytest.raises(ValueError):
        parse_float_grid("0:1:2:3")


def test_parse_int_list():
    assert parse_int_list("1,10,1e2") == [1, 10, 100]


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment line\n"
        "r = 0.3\n"
        "nth = 0.5   # trailing comment\n"
        "T = 0.1,0.2\n"
        "protocols = tmss,nlpa1\n"
    )
    values = load_config_file(str(path))
    cfg = build_config(values, {})
    assert cfg.r == 0.3
    assert cfg.n_th == 0.5
    assert cfg.T_grid == [0.1, 0.2]
    assert cfg.protocols == ("tmss", "nlpa1")


def test_cli_overrides_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("r = 0.3\nkappa = 0.02\n")
    cfg = build_config(load_config_file(str(path)), {"r": 0.7})
    assert cfg.r == 0.7
    assert cfg.kappa == 0.02


def test_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("bogus = 1\n")
    with pytest.raises(ValueError):
        build_config(load_config_file(str(path)), {})


def test_config_validation_errors():
    with pytest.raises(ValueError):
        RunConfig(kappa=0.0).validate()
    with pytest.raises(ValueError):
        RunConfig(T_grid=[0.5, 1.0]).validate()
    with pytest.raises(ValueError):
        RunConfig(protocols=("tmss", "bogus")).validate()
    with pytest.raises(ValueError):
        RunConfig(scheme="heterodyne").validate()


def test_default_t_grid_contains_named_points():
    grid = default_t_grid()
    assert grid[0] == 0.01 and grid[-1] == 0.96
    for point in (0.041, 0.125, 0.5):
        assert point in grid


# --- presets -----------------------------------------------------------------------

def test_every_preset_declares_one_file():
    for name in PRESET_NAMES:
        assert preset_files(name) == (f"{name}.csv",)
    with pytest.raises(ValueError):
        preset_files("fig99")


def test_fig1a_columns_and_values(tmp_path):
    cfg = small_config(T_grid=[0.01, 0.5], out_dir=str(tmp_path))
    paths = run_preset("fig1a", cfg)
    assert paths == {os.path.join(str(tmp_path), "fig1a.csv")}
    header, rows = read_csv(paths.pop())
    assert header == ["T", "EV_pa", "EV_ps", "EV_pc", "EV_nlpa1", "EV_tmss"]
    assert len(rows) == 2
    ev_tmss = rows[0][-1]
    assert rows[1][-1] == ev_tmss
    assert 0.27 <= ev_tmss <= 0.30


def test_fig1b_success_columns(tmp_path):
    cfg = small_config(T_grid=[0.01, 0.5], out_dir=str(tmp_path))
    (path,) = run_preset("fig1b", cfg)
    header, rows = read_csv(path)
    assert header == ["T", "P_pa", "P_ps", "P_pc", "P_nlpa1"]
    nlpa_first = rows[0][header.index("P_nlpa1")]
    assert nlpa_first == pytest.approx(0.9428661225, abs=1e-6)


def test_preset_rerun_is_byte_identical(tmp_path):
    cfg = small_config(T_grid=[0.01, 0.3, 0.9], out_dir=str(tmp_path))
    (path,) = run_preset("fig1a", cfg)
    first = open(path, "rb").read()
    run_preset("fig1a", cfg)
    assert open(path, "rb").read() == first


def test_csv_values_round_trip(tmp_path):
    cfg = small_config(T_grid=[0.013579, 0.5], out_dir=str(tmp_path))
    (path,) = run_preset("fig1a", cfg)
    _, rows = read_csv(path)
    ws = Workspace(cfg)
    from qillum.engineer import entanglement_entropy

    expected = entanglement_entropy(ws.probe("pa", 0.013579).state)
    assert rows[0][1] == expected  # 17 significant digits reproduce the double


@pytest.mark.filterwarnings("ignore:thermal state")
def test_error_curve_preset_schema(tmp_path):
    cfg = small_config(T_grid=[0.01, 0.5], K_grid=[1, 10], out_dir=str(tmp_path))
    (path,) = run_preset("fig1d", cfg)
    header, rows = read_csv(path)
    assert header[0] == "K"
    assert "perr_nlpa1" in header and "log10perr_tmss" in header
    k_col = [r[0] for r in rows]
    assert k_col == [1.0, 10.0]
    for row in rows:
        perr = row[header.index("perr_nlpa1")]
        log10p = row[header.index("log10perr_nlpa1")]
        assert math.log10(perr) == pytest.approx(log10p, abs=1e-9)


def test_unknown_preset_raises():
    with pytest.raises(ValueError):
        run_preset("fig99", small_config())


# --- sweeps ------------------------------------------------------------------------

def test_sweep_T_entropy_bell_point(tmp_path):
    cfg = small_config(protocols=("nlpa1",), out_dir=str(tmp_path))
    path = sweep("T", [0.0], "entropy", cfg)
    header, rows = read_csv(path)
    assert header == ["T", "entropy_nlpa1"]
    assert rows[0][1] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.filterwarnings("ignore:thermal state")
def test_sweep_kappa_q_indistinguishable_limit(tmp_path):
    # thermal tails on the return mode and environment depress both traces,
    # so both cutoffs must keep them below the 1e-4 margin tested here
    cfg = small_config(
        n_max=16, env_cutoff=28, protocols=("tmss",), T_grid=[0.01], out_dir=str(tmp_path)
    )
    path = sweep("kappa", [1e-6], "q", cfg)
    _, rows = read_csv(path)
    assert rows[0][1] >= 1.0 - 1e-4


@pytest.mark.filterwarnings("ignore:thermal state")
def test_sweep_K_p_error_rows(tmp_path):
    cfg = small_config(protocols=("tmss",), T_grid=[0.01], out_dir=str(tmp_path))
    path = sweep("K", [1, 10, 100], "p_error", cfg)
    _, rows = read_csv(path)
    ws = Workspace(cfg)
    q, _ = ws.q_and_success("tmss", 0.01, 1)
    for row in rows:
        assert row[1] == pytest.approx(0.5 * q ** row[0], rel=1e-12)


def test_sweep_gain_for_tmss_is_an_error(tmp_path):
    cfg = small_config(protocols=("tmss", "nlpa1"), out_dir=str(tmp_path))
    with pytest.raises(ValueError, match="reference"):
        sweep("T", [0.1], "gain", cfg)


def test_sweep_rejects_unsorted_grid(tmp_path):
    cfg = small_config(protocols=("nlpa1",), out_dir=str(tmp_path))
    with pytest.raises(ValueError, match="sorted"):
        sweep("T", [0.5, 0.1], "entropy", cfg)


def test_engineered_probe_rejects_unknown_protocol():
    from qillum.engineer import SqueezeParams

    with pytest.raises(ValueError):
        engineered_probe("bogus", 0.5, SqueezeParams(0.2), 8)


# --- CLI entry point ------------------------------------------------------------

def test_main_preset_smoke(tmp_path, capsys):
    code = main(
        ["--preset", "fig1b", "--out", str(tmp_path), "--T", "0.01,0.5",
         "--nmax", "8", "--env-cutoff", "8"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "fig1b.csv" in out
    assert os.path.exists(tmp_path / "fig1b.csv")


def test_main_sweep_smoke(tmp_path):
    code = main(
        ["--sweep", "T", "--metric", "success", "--grid", "0.1,0.2",
         "--protocols", "nlpa1", "--out", str(tmp_path), "--nmax", "8",
         "--env-cutoff", "8"]
    )
    assert code == 0
    assert os.path.exists(tmp_path / "sweep_T_success.csv")


def test_main_bad_arguments_exit_code(tmp_path):
    assert main(["--preset", "fig1a", "--kappa", "0", "--out", str(tmp_path)]) == 2
    assert main(["--preset", "fig1a", "--protocols", "bogus", "--out", str(tmp_path)]) == 2


def test_main_requires_exactly_one_mode():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


def test_main_io_failure_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(
        ["--preset", "fig1b", "--out", str(blocker / "sub"), "--T", "0.5",
         "--nmax", "6", "--env-cutoff", "6"]
    )
    assert code == 4


def test_main_missing_config_file_exit_code():
    assert main(["--preset", "fig1a", "--config", "/nonexistent/qillum.cfg"]) == 4
