import pytest
import yaml

from xresponse.config import (
    LagConfig,
    RunConfig,
    SourceConfig,
    load_config,
    save_config,
)
from xresponse.errors import ConfigError
from xresponse.grid import IntradayGrid
from xresponse.ingest import TickFileSchema
from xresponse.synth import SynthSpec


def synth_source(**kw):
    return SourceConfig(
        kind="synth",
        synth=SynthSpec(seed=1, n_stocks=2, n_days=3, slots=100, **kw),
    )


SAMPLE_YAML = """
source:
  kind: synth
  synth:
    seed: 42
    n_stocks: 4
    n_days: 10
    slots: 600
    sign_model:
      kind: iid
      p_trade: 0.4
      p_buy: 0.5
grid:
  open: "09:40:00"
  close: "09:50:00"
lags:
  dense_max: 50
  matrix: [1, 2, 10]
  rank: [1, 10]
  rank_primary: 10
averaging: nonzero
fit: false
rank_top: 3
out: results
jobs: 2
seed: 7
"""


def test_yaml_round_trip(tmp_path):
    cfg_path = tmp_path / "run.yaml"
    cfg_path.write_text(SAMPLE_YAML)
    cfg = load_config(str(cfg_path))
    assert cfg.source.kind == "synth"
    assert cfg.source.synth.n_stocks == 4
    assert cfg.grid == IntradayGrid(34800, 35400)
    assert cfg.lags.dense_max == 50
    assert cfg.lags.matrix == (1, 2, 10)
    assert cfg.fit is False and cfg.write_series is True
    assert cfg.rank_top == 3 and cfg.jobs == 2 and cfg.seed == 7

    back = tmp_path / "saved.yaml"
    save_config(cfg, str(back))
    again = load_config(str(back))
    assert again == cfg


def test_defaults():
    cfg = RunConfig(source=synth_source())
    assert cfg.grid == IntradayGrid()
    assert cfg.averaging == "nonzero"
    assert cfg.lags == LagConfig()
    assert cfg.lags.rank_primary == 300
    assert cfg.lags.matrix == (1, 2, 60, 300, 1800, 7200)
    assert cfg.jobs == 1 and cfg.block_days == 8
    assert cfg.fit and cfg.write_series


def test_unknown_keys_rejected(tmp_path):
    raw = yaml.safe_load(SAMPLE_YAML)
    raw["typo_key"] = 1
    p = tmp_path / "bad.yaml"
    p.write_text(yaml.safe_dump(raw))
    with pytest.raises(ConfigError, match="typo_key"):
        load_config(str(p))


def test_missing_source_block(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("jobs: 2\n")
    with pytest.raises(ConfigError, match="source"):
        load_config(str(p))


def test_empty_and_invalid_yaml(tmp_path):
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with pytest.raises(ConfigError, match="empty"):
        load_config(str(empty))
    bad = tmp_path / "syntax.yaml"
    bad.write_text("source: [unclosed\n")
    with pytest.raises(ConfigError, match="YAML"):
        load_config(str(bad))
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.yaml"))


def test_source_validation():
    with pytest.raises(ConfigError):
        SourceConfig(kind="database")
    with pytest.raises(ConfigError):
        SourceConfig(kind="files")  # needs tick_dir
    with pytest.raises(ConfigError):
        SourceConfig(kind="synth")  # needs synth block
    ok = SourceConfig(kind="files", tick_dir="/data/ticks")
    assert ok.schema == TickFileSchema()


def test_lag_validation():
    with pytest.raises(ConfigError):
        LagConfig(dense_max=0)
    with pytest.raises(ConfigError):
        LagConfig(matrix=())
    with pytest.raises(ConfigError):
        LagConfig(rank=(1, 2), rank_primary=3)


def test_run_validation():
    src = synth_source()
    with pytest.raises(ConfigError):
        RunConfig(source=src, averaging="median")
    with pytest.raises(ConfigError):
        RunConfig(source=src, jobs=0)
    with pytest.raises(ConfigError):
        RunConfig(source=src, rank_top=-1)
    with pytest.raises(ConfigError):
        RunConfig(source=src, block_days=0)


def test_override_precedence():
    cfg = RunConfig(source=synth_source(), jobs=1, out="a")
    same = cfg.override(jobs=None, out=None)
    assert same == cfg
    changed = cfg.override(jobs=4, out="b", seed=99)
    assert changed.jobs == 4 and changed.out == "b" and changed.seed == 99
    assert changed.source == cfg.source


def test_files_source_round_trip(tmp_path):
    cfg = RunConfig(
        source=SourceConfig(
            kind="files",
            tick_dir="/data/ticks",
            schema=TickFileSchema(delimiter=";", has_header=False),
        ),
        symbols=("GS", "JPM"),
        universe="custom.csv",
    )
    p = tmp_path / "files.yaml"
    save_config(cfg, str(p))
    again = load_config(str(p))
    assert again == cfg
    assert again.source.schema.delimiter == ";"
    assert again.symbols == ("GS", "JPM")
