"""Midpoint series construction and log-returns.

The midpoint at second t is (bid+ask)/2 of the last quote at or before t
within the session (a right-continuous step function). Seconds before the
day's first quote are missing, encoded as NaN. Log-returns use the natural
logarithm and never cross a session boundary.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import IntradayGrid
from .ingest import QuoteEvent


@dataclass(frozen=True)
class MidpointSeries:
    """Per-second midpoints for one stock-day.

    Attributes:
        values: float64 array of length grid.size; NaN before the first
            quote, positive and forward-filled afterwards.
        first_defined_slot: Index of the first defined slot, or len(values)
            when the day has no quotes at all.
    """

    symbol: str
    date: dt.date
    values: np.ndarray
    first_defined_slot: int

    @property
    def fully_missing(self) -> bool:
        return self.first_defined_slot >= len(self.values)

    def log_values(self) -> np.ndarray:
        """Natural log of the midpoints; NaN propagates."""
        with np.errstate(invalid="ignore"):
            return np.log(self.values)


def build_midpoints(
    quotes: Sequence[QuoteEvent],
    grid: IntradayGrid,
    symbol: str = "",
    date: dt.date | None = None,
) -> MidpointSeries:
    """Sample quote midpoints onto the one-second grid.

    values[t] is the midpoint of the last quote with second_of_day <= t
    (so several quotes in one second resolve to the final one). A day with
    zero quotes yields a fully missing series.

    Args:
        quotes: One day's quotes sorted by (second, seq); quotes outside the
            grid window are ignored.
        grid: Intraday grid.
        symbol: Stock symbol stamped on the result.
        date: Calendar day stamped on the result.

    Returns:
        MidpointSeries of length grid.size.
    """
    secs = []
    mids = []
    for q in quotes:
        if grid.contains(q.second_of_day):
            secs.append(q.second_of_day)
            mids.append((q.bid + q.ask) / 2)
    values = np.full(grid.size, np.nan, dtype=np.float64)
    if not secs:
        return MidpointSeries(
            symbol=symbol,
            date=date if date is not None else dt.date.min,
            values=values,
            first_defined_slot=grid.size,
        )
    qsec = np.asarray(secs, dtype=np.int64)
    qmid = np.asarray(mids, dtype=np.float64)
    t = grid.seconds()
    # index of the last quote at or before each second; -1 means none yet
    idx = np.searchsorted(qsec, t, side="right") - 1
    have = idx >= 0
    values[have] = qmid[idx[have]]
    first = int(np.argmax(have))
    return MidpointSeries(
        symbol=symbol,
        date=date if date is not None else dt.date.min,
        values=values,
        first_defined_slot=first,
    )


def log_return(m: MidpointSeries, t: int, tau: int) -> float:
    """Log-return of one day's midpoints from slot t to slot t+tau.

    Returns NaN when either endpoint is missing or t+tau runs past the end
    of the day (missing is a value here, not an error).
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    n = len(m.values)
    if t < 0 or t >= n or t + tau >= n:
        return math.nan
    a = m.values[t]
    b = m.values[t + tau]
    if not (np.isfinite(a) and np.isfinite(b)):
        return math.nan
    return math.log(b) - math.log(a)


def log_returns_at_lag(log_values: np.ndarray, tau: int) -> np.ndarray:
    """Vector of r(t, tau) for all t of one day, NaN where undefined.

    Args:
        log_values: Day's log-midpoints (NaN for missing slots).
        tau: Lag in seconds, >= 1.

    Returns:
        Array of the same length; entries t >= len-tau are NaN.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    n = len(log_values)
    out = np.full(n, np.nan, dtype=np.float64)
    if tau < n:
        out[: n - tau] = log_values[tau:] - log_values[: n - tau]
    return out
