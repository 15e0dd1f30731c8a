"""All-pairs batch engine for market-wide statistics.

Computes response and sign-correlator sums for every ordered stock pair at
a set of lags in one pass per day, using dense matrix products instead of
per-pair loops. Per-day panels are consumed lazily (a factory delivers the
panel for a day index), so a full market run never holds more than a few
days in memory.

Determinism contract: days are grouped into fixed-size blocks by index;
each block accumulates its days in order into a private partial, and the
partials are reduced in block order. BLAS threading is pinned to one
thread for the duration of a batch, so results are byte-identical for any
worker count.
"""

from __future__ import annotations

import datetime as dt
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DataError
from .estimators import LagCurve
from .returns import MidpointSeries
from .signing import SignSeries

DEFAULT_BLOCK_DAYS = 8


@dataclass(frozen=True)
class DayPanel:
    """Aligned per-second arrays for all stocks on one calendar day.

    Attributes:
        date: Calendar day.
        symbols: Stock order shared by all batch arrays.
        signs: int8 (n_stocks, slots) per-second signs; all-zero rows for
            stocks without trades.
        logmids: float64 (n_stocks, slots) log-midpoints; NaN only as a
            leading prefix per row (forward-filled afterwards).
        first_defined: int64 (n_stocks,) first defined log-midpoint slot,
            slots when the stock has no quotes.
        trade_present: bool (n_stocks,) whether the stock traded that day;
            a pair's statistics only accumulate on days where both traded.
    """

    date: dt.date
    symbols: tuple[str, ...]
    signs: np.ndarray
    logmids: np.ndarray
    first_defined: np.ndarray
    trade_present: np.ndarray

    def __post_init__(self):
        n = len(self.symbols)
        s = self.signs.shape[1] if self.signs.ndim == 2 else -1
        if self.signs.shape != (n, s) or self.logmids.shape != (n, s):
            raise ValueError("panel arrays must be (n_stocks, slots)")
        if self.first_defined.shape != (n,) or self.trade_present.shape != (n,):
            raise ValueError("per-stock vectors must have one entry per symbol")

    @property
    def slots(self) -> int:
        return self.signs.shape[1]

    @classmethod
    def from_series(
        cls,
        date: dt.date,
        symbols: Sequence[str],
        signs: Mapping[str, SignSeries],
        mids: Mapping[str, MidpointSeries],
        slots: int,
        trade_present: Mapping[str, bool] | None = None,
    ) -> "DayPanel":
        """Assemble a panel from per-stock series; absent stocks go dark.

        A symbol missing from `signs`/`mids` contributes an all-zero sign
        row and an all-NaN midpoint row. Unless given explicitly, trade
        presence is inferred from the sign series having any nonzero entry.
        """
        n = len(symbols)
        e = np.zeros((n, slots), dtype=np.int8)
        x = np.full((n, slots), np.nan, dtype=np.float64)
        first = np.full(n, slots, dtype=np.int64)
        present = np.zeros(n, dtype=bool)
        for i, sym in enumerate(symbols):
            ss = signs.get(sym)
            if ss is not None:
                if len(ss.values) != slots:
                    raise ValueError(f"sign series length mismatch for {sym}")
                e[i] = ss.values
            ms = mids.get(sym)
            if ms is not None:
                if len(ms.values) != slots:
                    raise ValueError(f"midpoint series length mismatch for {sym}")
                x[i] = ms.log_values()
                first[i] = ms.first_defined_slot
            if trade_present is not None:
                present[i] = bool(trade_present.get(sym, False))
            else:
                present[i] = ss is not None and bool((ss.values != 0).any())
        return cls(
            date=date,
            symbols=tuple(symbols),
            signs=e,
            logmids=x,
            first_defined=first,
            trade_present=present,
        )


@dataclass(frozen=True)
class BatchResult:
    """Accumulated all-pairs sums and counts over a day range.

    Array layout: (n_lags, n_stocks, n_stocks) with [k, i, j] holding the
    (responding i, impacting j) accumulation at lags[k].
    """

    symbols: tuple[str, ...]
    lags: np.ndarray
    n_days: int
    resp_sums: np.ndarray
    resp_counts: np.ndarray
    corr_sums: np.ndarray
    corr_counts: np.ndarray

    def _index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(f"unknown symbol {symbol!r}") from None

    def _values(self, sums, counts, i, j):
        out = np.full(len(self.lags), np.nan, dtype=np.float64)
        c = counts[:, i, j]
        have = c > 0
        out[have] = sums[:, i, j][have] / c[have]
        return out, c.copy()

    def pair_curve(self, kind: str, stock_i: str, stock_j: str) -> LagCurve:
        """LagCurve of one ordered pair; kind 'response' or 'sign_correlator'."""
        i = self._index(stock_i)
        j = self._index(stock_j)
        if kind == "response":
            values, counts = self._values(self.resp_sums, self.resp_counts, i, j)
        elif kind == "sign_correlator":
            values, counts = self._values(self.corr_sums, self.corr_counts, i, j)
        else:
            raise ValueError(f"no batch curves of kind {kind!r}")
        return LagCurve(
            kind=kind,
            stock_i=stock_i,
            stock_j=stock_j,
            lags=self.lags.copy(),
            values=values,
            counts=counts,
        )

    def lag_position(self, tau: int) -> int:
        pos = np.nonzero(self.lags == tau)[0]
        if not pos.size:
            raise KeyError(f"lag {tau} not in batch lag set")
        return int(pos[0])

    def matrix_raw(self, tau: int) -> np.ndarray:
        """All-pairs response values at one lag; NaN where no samples."""
        k = self.lag_position(tau)
        c = self.resp_counts[k]
        out = np.full(c.shape, np.nan, dtype=np.float64)
        have = c > 0
        out[have] = self.resp_sums[k][have] / c[have]
        return out

    def normalizer(self, tau: int) -> float:
        """Largest absolute response over all pairs at one lag."""
        m = self.matrix_raw(tau)
        finite = np.isfinite(m)
        return float(np.max(np.abs(m[finite]))) if finite.any() else 0.0


def _day_contribution(panel: DayPanel, lags: np.ndarray, count_all: bool, acc):
    """Add one day's all-pairs sums and counts into acc (in place)."""
    resp_sums, resp_counts, corr_sums, corr_counts = acc
    n, slots = panel.signs.shape
    e8 = panel.signs
    if not panel.trade_present.all():
        # absent stocks are silenced in both roles, even if the caller
        # handed over a nonzero sign row alongside trade_present=False
        e8 = np.where(panel.trade_present[:, None], e8, 0).astype(np.int8)
    ef = e8.astype(np.float64)
    xz = panel.logmids.copy()
    first = panel.first_defined.astype(np.int64).copy()
    present = panel.trade_present
    # a stock only participates as responder on days it trades
    eff = np.where(present, first, slots)
    for i in range(n):
        if eff[i] > 0:
            xz[i, : min(int(eff[i]), slots)] = 0.0
    if np.isnan(xz).any():
        raise ValueError("logmids must be NaN only on the leading prefix")
    # prefix counts of nonzero signs: pref[j, t] = # nonzero in eps_j[:t]
    pref = np.zeros((n, slots + 1), dtype=np.int64)
    np.cumsum(e8 != 0, axis=1, out=pref[:, 1:])
    tp = present.astype(np.int64)

    buf = np.empty((n, slots), dtype=np.float64)
    tmp = np.empty((n, n), dtype=np.float64)
    for k, tau in enumerate(lags):
        tau = int(tau)
        w = slots - tau
        if w <= 0:
            continue
        d = buf[:, :w]
        np.subtract(xz[:, tau:], xz[:, :w], out=d)
        effw = np.minimum(eff, w)
        for i in range(n):
            if effw[i] > 0:
                d[i, : int(effw[i])] = 0.0
        e_head = ef[:, :w]
        np.matmul(d, e_head.T, out=tmp)
        resp_sums[k] += tmp
        np.matmul(ef[:, tau:], e_head.T, out=tmp)
        corr_sums[k] += tmp
        if count_all:
            resp_counts[k] += np.outer(w - effw, tp)
            corr_counts[k] += w * np.outer(tp, tp)
        else:
            cw = pref[:, w]
            resp_counts[k] += cw[None, :] - pref[:, effw].T
            corr_counts[k] += np.outer(tp, cw)


def run_batch(
    panel_source: Callable[[int], DayPanel] | Sequence[DayPanel],
    n_days: int | None = None,
    lags=None,
    averaging_policy: str = "nonzero",
    jobs: int = 1,
    block_days: int = DEFAULT_BLOCK_DAYS,
) -> BatchResult:
    """Accumulate all-pairs statistics over a sequence of day panels.

    Args:
        panel_source: Either a sequence of DayPanels or a factory mapping a
            day index to its panel (preferred for large runs; panels are
            then built inside workers and discarded after use).
        n_days: Number of days when a factory is given.
        lags: Ascending positive lags shared by all accumulations.
        averaging_policy: "nonzero" or "all", as in the pair estimators.
        jobs: Worker threads; any value yields byte-identical results.
        block_days: Days per reduction block; part of the result's
            deterministic definition, so changing it may change low-order
            bits.

    Returns:
        BatchResult with (n_lags, N, N) sum/count arrays.
    """
    if callable(panel_source):
        if n_days is None:
            raise ValueError("n_days required with a panel factory")
        factory = panel_source
    else:
        panels = list(panel_source)
        n_days = len(panels)
        factory = panels.__getitem__
    if n_days == 0:
        raise DataError("batch needs at least one day")
    if averaging_policy not in ("nonzero", "all"):
        raise ValueError("averaging_policy must be nonzero or all")
    count_all = averaging_policy == "all"
    lags = np.asarray(lags, dtype=np.int64)
    if lags.ndim != 1 or lags.size == 0 or lags[0] < 1 or (np.diff(lags) <= 0).any():
        raise ValueError("lags must be a nonempty ascending array of ints >= 1")
    jobs = max(1, int(jobs))
    block_days = max(1, int(block_days))

    first_panel = factory(0)
    symbols = first_panel.symbols
    n = len(symbols)
    nlags = lags.size

    def block_partial(start: int, stop: int, seed_panel: DayPanel | None):
        acc = (
            np.zeros((nlags, n, n), dtype=np.float64),
            np.zeros((nlags, n, n), dtype=np.int64),
            np.zeros((nlags, n, n), dtype=np.float64),
            np.zeros((nlags, n, n), dtype=np.int64),
        )
        for d in range(start, stop):
            panel = seed_panel if (d == 0 and seed_panel is not None) else factory(d)
            if panel.symbols != symbols:
                raise ValueError(f"day {d}: symbol order differs across panels")
            _day_contribution(panel, lags, count_all, acc)
        return acc

    starts = list(range(0, n_days, block_days))
    totals = (
        np.zeros((nlags, n, n), dtype=np.float64),
        np.zeros((nlags, n, n), dtype=np.int64),
        np.zeros((nlags, n, n), dtype=np.float64),
        np.zeros((nlags, n, n), dtype=np.int64),
    )
    with threadpool_limits(limits=1):
        if jobs == 1:
            for s in starts:
                part = block_partial(s, min(s + block_days, n_days), first_panel if s == 0 else None)
                for t, p in zip(totals, part):
                    t += p
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(
                        block_partial,
                        s,
                        min(s + block_days, n_days),
                        first_panel if s == 0 else None,
                    )
                    for s in starts
                ]
                # reduce strictly in block order for run-to-run identity
                for fut in futures:
                    part = fut.result()
                    for t, p in zip(totals, part):
                        t += p
    return BatchResult(
        symbols=symbols,
        lags=lags,
        n_days=n_days,
        resp_sums=totals[0],
        resp_counts=totals[1],
        corr_sums=totals[2],
        corr_counts=totals[3],
    )
