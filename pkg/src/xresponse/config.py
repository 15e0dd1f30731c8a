"""Run configuration: one YAML file describing an end-to-end analysis.

A config names a data source (tick files on disk, or a synthetic market
spec), the universe, the intraday grid, the lag grids, the averaging
policy, and output/parallelism settings. CLI flags override config keys;
precedence is flag > config > built-in default. The in-memory form
round-trips losslessly through the on-disk YAML.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import yaml

from .errors import ConfigError
from .grid import (
    DENSE_MAX_LAG,
    LOG_GRID_MAX,
    LOG_GRID_SIZE,
    MATRIX_LAGS,
    RANK_LAGS,
    RANK_PRIMARY_LAG,
    IntradayGrid,
    format_hms,
    parse_hms,
)
from .estimators import AVERAGING_POLICIES
from .ingest import TickFileSchema
from .synth import SynthSpec

DEFAULT_SEED = 20080102
DEFAULT_RANK_TOP = 15


@dataclass(frozen=True)
class SourceConfig:
    """Where the market data comes from: a tick-file directory or a SynthSpec."""

    kind: str  # "files" | "synth"
    tick_dir: str | None = None
    schema: TickFileSchema = field(default_factory=TickFileSchema)
    synth: SynthSpec | None = None

    def __post_init__(self):
        if self.kind not in ("files", "synth"):
            raise ConfigError(f"source.kind must be 'files' or 'synth', got {self.kind!r}")
        if self.kind == "files" and not self.tick_dir:
            raise ConfigError("source.kind 'files' requires source.tick_dir")
        if self.kind == "synth" and self.synth is None:
            raise ConfigError("source.kind 'synth' requires a source.synth block")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.tick_dir is not None:
            out["tick_dir"] = self.tick_dir
        out["schema"] = self.schema.to_dict()
        if self.synth is not None:
            out["synth"] = self.synth.to_dict()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SourceConfig":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigError("source block must be a mapping with a 'kind' key")
        synth = None
        if d.get("synth") is not None:
            synth = SynthSpec.from_dict(d["synth"])
        return cls(
            kind=d["kind"],
            tick_dir=d.get("tick_dir"),
            schema=TickFileSchema.from_dict(d.get("schema") or {}),
            synth=synth,
        )


@dataclass(frozen=True)
class LagConfig:
    dense_max: int = DENSE_MAX_LAG
    log_points: int = LOG_GRID_SIZE
    log_max: int = LOG_GRID_MAX
    matrix: tuple[int, ...] = MATRIX_LAGS
    rank: tuple[int, ...] = RANK_LAGS
    rank_primary: int = RANK_PRIMARY_LAG

    def __post_init__(self):
        if self.dense_max < 1 or self.log_points < 2 or self.log_max < 2:
            raise ConfigError("lag grid sizes must be positive")
        for name, lags in (("matrix", self.matrix), ("rank", self.rank)):
            if not lags or any(int(t) < 1 for t in lags):
                raise ConfigError(f"lags.{name} must be a nonempty list of lags >= 1")
        if self.rank_primary not in self.rank:
            raise ConfigError("lags.rank_primary must be one of lags.rank")

    def to_dict(self) -> dict:
        return {
            "dense_max": self.dense_max,
            "log_points": self.log_points,
            "log_max": self.log_max,
            "matrix": list(self.matrix),
            "rank": list(self.rank),
            "rank_primary": self.rank_primary,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LagConfig":
        kw: dict[str, Any] = {}
        for key in ("dense_max", "log_points", "log_max", "rank_primary"):
            if key in d:
                kw[key] = int(d[key])
        for key in ("matrix", "rank"):
            if key in d:
                kw[key] = tuple(int(t) for t in d[key])
        return cls(**kw)


@dataclass(frozen=True)
class RunConfig:
    source: SourceConfig
    universe: str | None = None  # path to a roster CSV; None = bundled default
    symbols: tuple[str, ...] | None = None  # restrict to these symbols, this order
    grid: IntradayGrid = field(default_factory=IntradayGrid)
    lags: LagConfig = field(default_factory=LagConfig)
    averaging: str = "nonzero"
    fit: bool = True
    write_series: bool = True
    rank_top: int = DEFAULT_RANK_TOP
    out: str = "out"
    jobs: int = 1
    seed: int = DEFAULT_SEED
    block_days: int = 8

    def __post_init__(self):
        if self.averaging not in AVERAGING_POLICIES:
            raise ConfigError(
                f"averaging must be one of {AVERAGING_POLICIES}, got {self.averaging!r}"
            )
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.rank_top < 0:
            raise ConfigError("rank_top must be >= 0")
        if self.block_days < 1:
            raise ConfigError("block_days must be >= 1")

    def override(self, **kw) -> "RunConfig":
        """New config with non-None keyword overrides applied (CLI precedence)."""
        updates = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **updates) if updates else self

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "universe": self.universe,
            "symbols": list(self.symbols) if self.symbols is not None else None,
            "grid": {
                "open": format_hms(self.grid.start_second),
                "close": format_hms(self.grid.end_second),
            },
            "lags": self.lags.to_dict(),
            "averaging": self.averaging,
            "fit": self.fit,
            "write_series": self.write_series,
            "rank_top": self.rank_top,
            "out": self.out,
            "jobs": self.jobs,
            "seed": self.seed,
            "block_days": self.block_days,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict) or "source" not in d:
            raise ConfigError("config must be a mapping with a 'source' block")
        known = {
            "source",
            "universe",
            "symbols",
            "grid",
            "lags",
            "averaging",
            "fit",
            "write_series",
            "rank_top",
            "out",
            "jobs",
            "seed",
            "block_days",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw: dict[str, Any] = {"source": SourceConfig.from_dict(d["source"])}
        if d.get("universe") is not None:
            kw["universe"] = str(d["universe"])
        if d.get("symbols") is not None:
            kw["symbols"] = tuple(str(s) for s in d["symbols"])
        g = d.get("grid") or {}
        kw["grid"] = IntradayGrid(
            start_second=parse_hms(g["open"]) if "open" in g else IntradayGrid().start_second,
            end_second=parse_hms(g["close"]) if "close" in g else IntradayGrid().end_second,
        )
        kw["lags"] = LagConfig.from_dict(d.get("lags") or {})
        for key, conv in (
            ("averaging", str),
            ("fit", bool),
            ("write_series", bool),
            ("rank_top", int),
            ("out", str),
            ("jobs", int),
            ("seed", int),
            ("block_days", int),
        ):
            if key in d and d[key] is not None:
                kw[key] = conv(d[key])
        return cls(**kw)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    if raw is None:
        raise ConfigError(f"config {path} is empty")
    return RunConfig.from_dict(raw)


def save_config(config: RunConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=True, default_flow_style=False)
