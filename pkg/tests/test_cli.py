import json
import os

import pytest

from xresponse.cli import main
from xresponse.config import LagConfig, RunConfig, SourceConfig, save_config
from xresponse.synth import IidSignModel, SynthSpec, load_calibration, synth_grid


@pytest.fixture(scope="module")
def cfg_path(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = RunConfig(
        source=SourceConfig(
            kind="synth",
            synth=SynthSpec(
                seed=321,
                n_stocks=2,
                n_days=3,
                slots=120,
                sign_model=IidSignModel(p_trade=0.5),
                noise_sigma=1e-3,
            ),
        ),
        lags=LagConfig(
            dense_max=20, log_points=6, log_max=50, matrix=(1, 2, 10),
            rank=(1, 10), rank_primary=10,
        ),
        out=str(root / "default_out"),
    )
    path = root / "run.yaml"
    save_config(cfg, str(path))
    return str(path)


# ---------------------------------------------------------------------------
# exit codes


def test_missing_config_is_usage_error(tmp_path, capsys):
    rc = main(["run", "--out", str(tmp_path)])
    assert rc == 1
    assert "usage error" in capsys.readouterr().err


def test_unknown_command_exits_one():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_missing_required_flag_exits_one(cfg_path):
    with pytest.raises(SystemExit) as exc:
        main(["respond", "--config", cfg_path])
    assert exc.value.code == 1


def test_data_error_exit(tmp_path, capsys):
    bad = RunConfig(
        source=SourceConfig(kind="files", tick_dir=str(tmp_path / "nowhere")),
        symbols=("GS",),
        out=str(tmp_path / "o"),
    )
    p = tmp_path / "bad.yaml"
    save_config(bad, str(p))
    rc = main(["run", "--config", str(p)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_numeric_error_exit(tmp_path, capsys):
    curve = tmp_path / "short.csv"
    curve.write_text("tau,value,count\n1,0.4,5\n2,0.3,5\n3,0.2,5\n")
    rc = main(["fit", "--curve", str(curve), "--out", str(tmp_path)])
    assert rc == 3
    assert "numeric failure" in capsys.readouterr().err


def test_malformed_config_is_data_error(tmp_path, capsys):
    p = tmp_path / "broken.yaml"
    p.write_text("source: {kind: teleport}\n")
    rc = main(["run", "--config", str(p)])
    assert rc == 2


# ---------------------------------------------------------------------------
# pipeline and emission commands


def test_run_command(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "run_out")
    rc = main(["run", "--config", cfg_path, "--out", out, "--jobs", "2"])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "manifest.json" in stdout and "stages:" in stdout
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["completed_stages"][-1] == "fit"


def test_synth_then_ingest(cfg_path, tmp_path, capsys):
    ticks = str(tmp_path / "ticks")
    rc = main(["synth", "--config", cfg_path, "--out", ticks])
    assert rc == 0
    assert os.path.exists(os.path.join(ticks, "ground_truth.json"))
    assert os.path.exists(os.path.join(ticks, "S00_trades.csv"))
    capsys.readouterr()

    files_cfg = RunConfig(
        source=SourceConfig(kind="files", tick_dir=ticks),
        symbols=("S00", "S01"),
        grid=synth_grid(SynthSpec(seed=321, n_stocks=2, n_days=3, slots=120)),
        out=str(tmp_path / "ing"),
    )
    p = tmp_path / "files.yaml"
    save_config(files_cfg, str(p))
    rc = main(["ingest", "--config", str(p)])
    assert rc == 0
    report = json.load(open(os.path.join(files_cfg.out, "ingest_report.json")))
    assert report["symbols"] == ["S00", "S01"]


def test_seed_override_rewrites_synth_source(cfg_path, tmp_path, capsys):
    ticks = str(tmp_path / "seeded")
    rc = main(["synth", "--config", cfg_path, "--out", ticks, "--seed", "999"])
    assert rc == 0
    truth = json.load(open(os.path.join(ticks, "ground_truth.json")))
    assert truth["spec"]["seed"] == 999


# ---------------------------------------------------------------------------
# per-symbol and per-pair commands


def test_signs_and_midpoints(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "series")
    assert main(["signs", "--config", cfg_path, "--out", out, "--symbol", "S00"]) == 0
    assert main([
        "midpoints", "--config", cfg_path, "--out", out,
        "--symbol", "S01", "--date", "2008-01-02",
    ]) == 0
    assert os.path.exists(os.path.join(out, "signs", "S00", "2008-01-02.csv"))
    assert os.path.exists(os.path.join(out, "midpoints", "S01", "2008-01-02.csv"))
    assert main([
        "signs", "--config", cfg_path, "--out", out,
        "--symbol", "S00", "--date", "not-a-date",
    ]) == 2
    assert main([
        "signs", "--config", cfg_path, "--out", out, "--symbol", "NOPE",
    ]) == 2


def test_pair_curves(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "pairs")
    for op in ("respond", "correlate", "noise"):
        rc = main([op, "--config", cfg_path, "--out", out, "--pair", "S00,S01"])
        assert rc == 0
        assert os.path.exists(os.path.join(out, "curves", f"{op}_S00_S01.csv"))
    rc = main(["respond", "--config", cfg_path, "--out", out, "--pair", "S00S01"])
    assert rc == 2
    rc = main([
        "correlate", "--config", cfg_path, "--out", out,
        "--pair", "S00,S01", "--lag-grid", "log",
    ])
    assert rc == 0
    log_curve = os.path.join(out, "curves", "correlate_S00_S01.csv")
    assert len(open(log_curve).read().splitlines()) == 7  # header + 6 log lags


def test_matrix_command(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "mx")
    rc = main(["matrix", "--config", cfg_path, "--out", out, "--tau", "2"])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "matrix", "matrix_tau2.csv"))
    assert os.path.exists(os.path.join(out, "matrix", "heatmap_tau2.txt"))
    assert main(["matrix", "--config", cfg_path, "--out", out, "--tau", "0"]) == 2


def test_average_command(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "avg")
    rc = main(["average", "--config", cfg_path, "--out", out])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "curves", "avg_response.csv"))
    rc = main([
        "average", "--config", cfg_path, "--out", out,
        "--mode", "passive", "--stock", "S00", "--kind", "correlator",
    ])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "curves", "passive_correlator_S00.csv"))
    assert main(["average", "--config", cfg_path, "--out", out, "--mode", "active"]) == 2
    assert main([
        "average", "--config", cfg_path, "--out", out,
        "--mode", "passive", "--stock", "S00", "--pool", "sector:XYZ",
    ]) == 2


def test_rank_command(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "rank")
    rc = main(["rank", "--config", cfg_path, "--out", out])
    assert rc == 0
    lines = open(os.path.join(out, "rank", "rank_passive.csv")).read().splitlines()
    assert lines[0] == "rank,symbol,value_tau1,value_tau10"
    rc = main([
        "rank", "--config", cfg_path, "--out", out,
        "--mode", "active", "--lags", "1,2", "--primary", "2", "--k", "1",
    ])
    assert rc == 0
    active = open(os.path.join(out, "rank", "rank_active.csv")).read().splitlines()
    assert len(active) == 2  # header + top 1
    assert main([
        "rank", "--config", cfg_path, "--out", out, "--lags", "1,2", "--primary", "7",
    ]) == 2
    assert main([
        "rank", "--config", cfg_path, "--out", out, "--lags", "one,two",
    ]) == 2


def test_fit_command(cfg_path, tmp_path, capsys):
    out = str(tmp_path / "fitcmd")
    rc = main([
        "respond", "--config", cfg_path, "--out", out,
        "--pair", "S00,S01", "--lag-grid", "log",
    ])
    assert rc == 0
    capsys.readouterr()
    curve_path = os.path.join(out, "curves", "respond_S00_S01.csv")
    rc = main(["fit", "--curve", curve_path, "--out", out])
    assert rc == 0
    printed = json.loads(capsys.readouterr().out)
    assert set(printed) >= {"theta", "tau0", "gamma", "chi2", "M"}
    assert os.path.exists(os.path.join(out, "respond_S00_S01_fit.json"))


def test_calibrate_command(tmp_path, capsys):
    out_file = str(tmp_path / "cal.json")
    rc = main(["calibrate", "--samples", "40000", "--out", out_file, "--seed", "5"])
    assert rc == 0
    latent, sign = load_calibration(out_file)
    assert latent[0] == 0.0 and latent[-1] == 1.0
    assert sign[0] == 0.0 and sign[-1] == 1.0
