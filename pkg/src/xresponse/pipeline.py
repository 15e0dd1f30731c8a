"""End-to-end orchestration: data source -> batch statistics -> artifacts.

A run loads the market (tick files or the synthetic generator), sweeps all
ordered stock pairs over the union of the configured lag grids in one batch
pass, derives averaged curves, matrices, rankings, and fits, and writes a
manifest tying every artifact hash to the config and input hashes. Re-runs
with the same config and inputs are byte-identical at any parallelism.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import os
import platform
from typing import Callable, Iterator, Sequence

import numpy as np
import scipy

from . import __version__
from ._kernels import BACKEND
from .artifacts import (
    sha256_file,
    sha256_text,
    stable_json,
    write_curve_csv,
    write_fit_json,
    write_heatmap_data,
    write_json,
    write_matrix_csv,
    write_matrix_sidecar,
    write_midpoints_csv,
    write_signs_csv,
)
from .batch import BatchResult, DayPanel, run_batch
from .config import RunConfig
from .errors import DataError, NumericError
from .estimators import (
    LagCurve,
    active_response,
    market_average_correlator,
    market_average_response,
    market_response_matrix,
    passive_response,
    rank_by_response,
)
from .fitting import fit_power_law
from .grid import IntradayGrid, log_spaced_lags
from .ingest import (
    CommonDays,
    TickDay,
    clip_to_grid,
    common_days,
    merge_tick_days,
    parse_tick_file,
    trading_dates,
)
from .returns import MidpointSeries, build_midpoints
from .signing import SignSeries, sign_day
from .synth import SynthSpec, day_series, generate_day_panel, synth_grid
from .universe import Universe, load_universe

MANIFEST_SCHEMA = "xresponse-run-manifest-v1"

# config keys that steer execution but cannot change any computed number;
# they are excluded from the analysis identity hash
EXECUTION_KEYS = ("jobs", "out")

SYNTH_SECTOR = "SYN"


def analysis_config_dict(config: RunConfig) -> dict:
    d = config.to_dict()
    for key in EXECUTION_KEYS:
        d.pop(key, None)
    return d


class MarketData:
    """Uniform access to one market: panels for batch, series for pairs."""

    symbols: tuple[str, ...]
    sectors: tuple[str, ...]
    dates: tuple[dt.date, ...]
    grid: IntradayGrid
    input_records: dict

    @property
    def n_days(self) -> int:
        return len(self.dates)

    def panel(self, day_idx: int) -> DayPanel:
        raise NotImplementedError

    def symbol_days(self, symbol: str) -> Iterator[tuple[dt.date, SignSeries, MidpointSeries]]:
        """The symbol's trading days in date order with both series."""
        raise NotImplementedError

    def pair_series(
        self, sym_i: str, sym_j: str
    ) -> tuple[list[MidpointSeries], list[SignSeries], list[SignSeries], CommonDays]:
        """Aligned (mids_i, signs_i, signs_j) over the pair's common days."""
        raise NotImplementedError

    def check_symbol(self, symbol: str) -> None:
        if symbol not in self.symbols:
            raise DataError(f"symbol {symbol!r} not in this run's universe")


class SynthMarket(MarketData):
    def __init__(self, spec: SynthSpec, sectors: Sequence[str]):
        self.spec = spec
        self.symbols = spec.resolved_symbols()
        self.sectors = tuple(sectors)
        self.grid = synth_grid(spec)
        from .synth import date_for_day

        self.dates = tuple(date_for_day(d) for d in range(spec.n_days))
        self.input_records = {
            "synth_spec_sha256": sha256_text(stable_json(spec.to_dict())),
            "seed": spec.seed,
        }

    def panel(self, day_idx: int) -> DayPanel:
        return generate_day_panel(self.spec, day_idx)

    def symbol_days(self, symbol: str):
        self.check_symbol(symbol)
        for d in range(self.spec.n_days):
            signs, mids = day_series(self.spec, d)
            s = signs[symbol]
            if np.any(s.values != 0):
                yield self.dates[d], s, mids[symbol]

    def pair_series(self, sym_i: str, sym_j: str):
        self.check_symbol(sym_i)
        self.check_symbol(sym_j)
        mids_i, signs_i, signs_j, dates = [], [], [], []
        for d in range(self.spec.n_days):
            signs, mids = day_series(self.spec, d)
            if np.any(signs[sym_i].values != 0) and np.any(signs[sym_j].values != 0):
                dates.append(self.dates[d])
                mids_i.append(mids[sym_i])
                signs_i.append(signs[sym_i])
                signs_j.append(signs[sym_j])
        return mids_i, signs_i, signs_j, CommonDays(dates=tuple(dates))


class FileMarket(MarketData):
    def __init__(self, config: RunConfig, symbols: Sequence[str], sectors: Sequence[str]):
        self.symbols = tuple(symbols)
        self.sectors = tuple(sectors)
        self.grid = config.grid
        tick_dir = config.source.tick_dir
        schema = config.source.schema
        self.input_records = {}
        self.reports = {}
        # per symbol: date -> (SignSeries, MidpointSeries); plus trading dates
        self._days: dict[str, dict[dt.date, tuple[SignSeries, MidpointSeries]]] = {}
        self._trading: dict[str, set[dt.date]] = {}
        all_dates: set[dt.date] = set()
        for sym in self.symbols:
            paths = {
                "trades": os.path.join(tick_dir, f"{sym}_trades.csv"),
                "quotes": os.path.join(tick_dir, f"{sym}_quotes.csv"),
            }
            for kind in ("trades", "quotes"):
                if not os.path.exists(paths[kind]):
                    raise DataError(f"missing input file: {paths[kind]}")
            trade_days, trade_report = parse_tick_file(paths["trades"], sym, schema, "trades")
            quote_days, quote_report = parse_tick_file(paths["quotes"], sym, schema, "quotes")
            self.reports[sym] = {"trades": trade_report, "quotes": quote_report}
            for kind in ("trades", "quotes"):
                rel = f"{sym}_{kind}.csv"
                self.input_records[rel] = sha256_file(paths[kind])
            merged = [clip_to_grid(day, self.grid) for day in merge_tick_days(trade_days, quote_days)]
            per_date = {}
            trading = set()
            for day in merged:
                signs, _ = sign_day(day.trades, self.grid, sym, day.date)
                mids = build_midpoints(day.quotes, self.grid, sym, day.date)
                per_date[day.date] = (signs, mids)
                if day.trades:
                    trading.add(day.date)
            self._days[sym] = per_date
            self._trading[sym] = trading
            all_dates |= trading
        self.dates = tuple(sorted(all_dates))
        if not self.dates:
            raise DataError("no trading days found in any input file")

    def panel(self, day_idx: int) -> DayPanel:
        date = self.dates[day_idx]
        signs = {}
        mids = {}
        present = {}
        for sym in self.symbols:
            if date in self._trading[sym]:
                s, m = self._days[sym][date]
                signs[sym] = s
                mids[sym] = m
                present[sym] = True
        return DayPanel.from_series(
            date, self.symbols, signs, mids, self.grid.size, trade_present=present
        )

    def symbol_days(self, symbol: str):
        self.check_symbol(symbol)
        for date in sorted(self._trading[symbol]):
            s, m = self._days[symbol][date]
            yield date, s, m

    def pair_series(self, sym_i: str, sym_j: str):
        self.check_symbol(sym_i)
        self.check_symbol(sym_j)
        common = common_days(self._trading[sym_i], self._trading[sym_j])
        mids_i, signs_i, signs_j = [], [], []
        for date in common.dates:
            si, mi = self._days[sym_i][date]
            sj, _ = self._days[sym_j][date]
            mids_i.append(mi)
            signs_i.append(si)
            signs_j.append(sj)
        return mids_i, signs_i, signs_j, common


def _resolve_roster(config: RunConfig) -> tuple[tuple[str, ...], tuple[str, ...], Universe]:
    universe = load_universe(config.universe)
    if config.source.kind == "synth":
        spec = config.source.synth
        if spec.symbols is not None:
            symbols = spec.resolved_symbols()
        elif config.symbols is not None:
            if len(config.symbols) != spec.n_stocks:
                raise DataError(
                    f"config names {len(config.symbols)} symbols but the synthetic "
                    f"market has {spec.n_stocks} stocks"
                )
            symbols = tuple(config.symbols)
        else:
            symbols = spec.resolved_symbols()
        sectors = tuple(
            universe.sector_of(s) if s in universe else SYNTH_SECTOR for s in symbols
        )
        return symbols, sectors, universe
    symbols = tuple(config.symbols) if config.symbols is not None else universe.symbols
    sectors = tuple(
        universe.sector_of(s) if s in universe else SYNTH_SECTOR for s in symbols
    )
    return symbols, sectors, universe


def load_market(config: RunConfig) -> MarketData:
    """Materialize the configured data source.

    Raises:
        DataError: On the first missing input path, or an empty market.
    """
    symbols, sectors, _ = _resolve_roster(config)
    if config.source.kind == "synth":
        spec = config.source.synth
        if spec.symbols is None and symbols != spec.resolved_symbols():
            spec = dataclasses.replace(spec, symbols=symbols)
        return SynthMarket(spec, sectors)
    return FileMarket(config, symbols, sectors)


def subset_curve(curve: LagCurve, lags: Sequence[int]) -> LagCurve:
    """Restrict a curve to a sub-grid of its lags (order preserved)."""
    want = [int(t) for t in lags]
    index = {int(t): k for k, t in enumerate(curve.lags)}
    try:
        pos = [index[t] for t in want]
    except KeyError as exc:
        raise KeyError(f"lag {exc.args[0]} not in curve lag grid") from None
    return LagCurve(
        kind=curve.kind,
        stock_i=curve.stock_i,
        stock_j=curve.stock_j,
        lags=np.asarray(want, dtype=np.int64),
        values=curve.values[pos],
        counts=curve.counts[pos],
        product_std=None if curve.product_std is None else curve.product_std[pos],
    )


def union_lags(config: RunConfig) -> np.ndarray:
    log = log_spaced_lags(config.lags.log_points, config.lags.log_max)
    merged = sorted(set(int(t) for t in log) | set(config.lags.matrix) | set(config.lags.rank))
    return np.asarray(merged, dtype=np.int64)


def compute_batch(config: RunConfig, market: MarketData, lags) -> BatchResult:
    return run_batch(
        market.panel,
        n_days=market.n_days,
        lags=lags,
        averaging_policy=config.averaging,
        jobs=config.jobs,
        block_days=config.block_days,
    )


def pair_response_curves(batch: BatchResult) -> dict[tuple[str, str], LagCurve]:
    return {
        (i, j): batch.pair_curve("response", i, j)
        for i in batch.symbols
        for j in batch.symbols
        if i != j
    }


def pair_correlator_curves(batch: BatchResult) -> dict[tuple[str, str], LagCurve]:
    return {
        (i, j): batch.pair_curve("sign_correlator", i, j)
        for i in batch.symbols
        for j in batch.symbols
        if i != j
    }


def pool_average(
    batch: BatchResult,
    mode: str,
    stock: str,
    pool: Sequence[str],
    kind: str = "response",
) -> LagCurve:
    """Passive or active pool mean for one stock from batch statistics."""
    from .estimators import active_correlator, passive_correlator

    members = [s for s in pool if s != stock]
    if not members:
        raise DataError("empty pool")
    if mode == "passive":
        curves = [batch.pair_curve(kind, stock, j) for j in members]
        fn = passive_response if kind == "response" else passive_correlator
    elif mode == "active":
        curves = [batch.pair_curve(kind, i, stock) for i in members]
        fn = active_response if kind == "response" else active_correlator
    else:
        raise ValueError("mode must be 'passive' or 'active'")
    return fn(stock, curves)


def normalized_rank_values(
    batch: BatchResult, mode: str, rank_lags: Sequence[int]
) -> dict[str, np.ndarray]:
    """Per-symbol pool-averaged response at the rank lags, normalized per lag.

    The normalizer at each lag is the all-pairs maximum |R| at that lag,
    the same denominator the response matrix uses.
    """
    norms = np.array([batch.normalizer(int(t)) for t in rank_lags])
    out = {}
    for sym in batch.symbols:
        curve = pool_average(batch, mode, sym, batch.symbols)
        vals = np.array([curve.value_at(int(t)) for t in rank_lags])
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.where(norms > 0, vals / norms, np.nan)
        out[sym] = vals
    return out


def write_rank_csv(ranked, rank_lags: Sequence[int], path: str) -> None:
    import csv

    from .artifacts import _ensure_parent, _fmt

    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "symbol", *(f"value_tau{int(t)}" for t in rank_lags)])
        for pos, (sym, vals) in enumerate(ranked, start=1):
            w.writerow([pos, sym, *(_fmt(v) for v in vals)])


def _versions() -> dict:
    return {
        "python": platform.python_version(),
        "xresponse": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernels": BACKEND,
    }


def run_pipeline(config: RunConfig) -> dict:
    """Execute the full analysis described by a config; return the manifest.

    Writes every artifact under config.out plus manifest.json recording the
    analysis-config hash, input hashes, library versions, and a sha256 per
    artifact. A stage failure still writes the manifest, with the failed
    stage named, before the error propagates.
    """
    out_dir = config.out
    os.makedirs(out_dir, exist_ok=True)
    market = load_market(config)

    analysis_cfg = analysis_config_dict(config)
    artifacts: dict[str, str] = {}
    completed: list[str] = []

    def emit(relpath: str, writer: Callable[[str], None]) -> None:
        path = os.path.join(out_dir, relpath)
        writer(path)
        artifacts[relpath] = sha256_file(path)

    def manifest_dict(failed: str | None = None, error: str | None = None) -> dict:
        out = {
            "schema": MANIFEST_SCHEMA,
            "config": analysis_cfg,
            "config_sha256": sha256_text(stable_json(analysis_cfg)),
            "inputs": market.input_records,
            "versions": _versions(),
            "symbols": list(market.symbols),
            "n_days": market.n_days,
            "completed_stages": list(completed),
            "artifacts": dict(sorted(artifacts.items())),
        }
        if failed is not None:
            out["failed_stage"] = failed
            out["error"] = error or ""
        return out

    stage = "setup"
    try:
        if config.write_series:
            stage = "signs"
            for sym in market.symbols:
                for date, signs, _ in market.symbol_days(sym):
                    rel = os.path.join("signs", sym, f"{date.isoformat()}.csv")
                    emit(rel, lambda p, s=signs: write_signs_csv(s, market.grid.start_second, p))
            completed.append("signs")

        stage = "batch"
        lags = union_lags(config)
        batch = compute_batch(config, market, lags)
        completed.append("batch")

        stage = "average"
        log_lags = [int(t) for t in log_spaced_lags(config.lags.log_points, config.lags.log_max)]
        resp_pairs = pair_response_curves(batch)
        corr_pairs = pair_correlator_curves(batch)
        if len(market.symbols) > 1:
            avg_resp = subset_curve(market_average_response(resp_pairs, market.symbols), log_lags)
            avg_corr = subset_curve(market_average_correlator(corr_pairs, market.symbols), log_lags)
            emit("curves/avg_response.csv", lambda p: write_curve_csv(avg_resp, p))
            emit("curves/avg_correlator.csv", lambda p: write_curve_csv(avg_corr, p))
        else:
            avg_resp = avg_corr = None
        completed.append("average")

        stage = "matrix"
        for tau in config.lags.matrix:
            matrix = market_response_matrix(
                batch.matrix_raw(int(tau)), market.symbols, market.sectors, int(tau)
            )
            emit(f"matrix/matrix_tau{int(tau)}.csv", lambda p, m=matrix: write_matrix_csv(m, p))
            emit(
                f"matrix/matrix_tau{int(tau)}.meta.json",
                lambda p, m=matrix: write_matrix_sidecar(m, p),
            )
            emit(f"matrix/heatmap_tau{int(tau)}.txt", lambda p, m=matrix: write_heatmap_data(m, p))
        completed.append("matrix")

        if len(market.symbols) > 1:
            stage = "rank"
            for mode in ("passive", "active"):
                values = normalized_rank_values(batch, mode, config.lags.rank)
                ranked = rank_by_response(
                    values,
                    config.lags.rank,
                    k=config.rank_top,
                    primary_lag=config.lags.rank_primary,
                )
                emit(
                    f"rank/rank_{mode}.csv",
                    lambda p, r=ranked: write_rank_csv(r, config.lags.rank, p),
                )
            completed.append("rank")

        if config.fit and avg_resp is not None:
            stage = "fit"
            for name, curve in (("avg_response", avg_resp), ("avg_correlator", avg_corr)):
                try:
                    fit = fit_power_law(curve)
                except NumericError as exc:
                    emit(
                        f"fits/{name}.json",
                        lambda p, e=str(exc): write_json({"error": e}, p),
                    )
                else:
                    emit(f"fits/{name}.json", lambda p, f=fit: write_fit_json(f, p))
            completed.append("fit")
    except Exception as exc:
        write_json(manifest_dict(failed=stage, error=str(exc)), os.path.join(out_dir, "manifest.json"))
        raise

    manifest = manifest_dict()
    write_json(manifest, os.path.join(out_dir, "manifest.json"))
    return manifest


def write_symbol_series(
    market: MarketData,
    symbol: str,
    out_dir: str,
    what: str,
    date: dt.date | None = None,
) -> list[str]:
    """Write per-day sign or midpoint CSVs for one symbol; returns relpaths."""
    if what not in ("signs", "midpoints"):
        raise ValueError("what must be 'signs' or 'midpoints'")
    written = []
    found = False
    for day_date, signs, mids in market.symbol_days(symbol):
        if date is not None and day_date != date:
            continue
        found = True
        rel = os.path.join(what, symbol, f"{day_date.isoformat()}.csv")
        path = os.path.join(out_dir, rel)
        if what == "signs":
            write_signs_csv(signs, market.grid.start_second, path)
        else:
            write_midpoints_csv(mids, market.grid.start_second, path)
        written.append(rel)
    if date is not None and not found:
        raise DataError(f"{symbol} has no trading day {date.isoformat()}")
    if not written and date is None:
        raise DataError(f"{symbol} has no trading days")
    return written


def ingest_report(market: MarketData) -> dict:
    """Parse/trading-day summary for a file-backed market."""
    if not isinstance(market, FileMarket):
        raise DataError("ingest requires a files source")
    symbols = market.symbols
    per_symbol = {}
    for sym in symbols:
        per_symbol[sym] = {
            "trades": market.reports[sym]["trades"].to_dict(),
            "quotes": market.reports[sym]["quotes"].to_dict(),
            "trading_days": len(market._trading[sym]),
        }
    common: set | None = None
    for sym in symbols:
        common = market._trading[sym] if common is None else (common & market._trading[sym])
    common = common or set()
    return {
        "symbols": list(symbols),
        "per_symbol": per_symbol,
        "all_common_days": [d.isoformat() for d in sorted(common)],
        "n_all_common_days": len(common),
    }
