"""Shared fixtures and series builders for the test suite."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from xresponse.grid import IntradayGrid
from xresponse.ingest import QuoteEvent, TradeEvent
from xresponse.returns import MidpointSeries
from xresponse.signing import SignSeries

BASE_DATE = dt.date(2008, 1, 2)


def nth_weekday(n: int, start: dt.date = BASE_DATE) -> dt.date:
    d = start
    while d.weekday() >= 5:
        d += dt.timedelta(days=1)
    for _ in range(n):
        d += dt.timedelta(days=1)
        while d.weekday() >= 5:
            d += dt.timedelta(days=1)
    return d


def make_sign_series(values, symbol="AAA", day=0) -> SignSeries:
    return SignSeries(
        symbol=symbol,
        date=nth_weekday(day),
        values=np.asarray(values, dtype=np.int8),
    )


def make_mid_series(values, symbol="AAA", day=0) -> MidpointSeries:
    vals = np.asarray(values, dtype=np.float64)
    defined = np.isfinite(vals)
    first = int(np.argmax(defined)) if defined.any() else len(vals)
    return MidpointSeries(
        symbol=symbol, date=nth_weekday(day), values=vals, first_defined_slot=first
    )


def random_mid_values(rng, slots: int, missing_prefix: int = 0) -> np.ndarray:
    """Positive random-walk midpoints with an optional NaN prefix."""
    steps = rng.normal(0.0, 3e-4, size=slots)
    vals = 100.0 * np.exp(np.cumsum(steps))
    if missing_prefix > 0:
        vals[:missing_prefix] = np.nan
    return vals


def random_sign_values(rng, slots: int, p_zero=0.4) -> np.ndarray:
    u = rng.random(slots)
    vals = np.where(u < p_zero, 0, np.where(u < p_zero + (1 - p_zero) / 2, 1, -1))
    return vals.astype(np.int8)


def random_pair_days(rng, n_days: int, slots: int, sym_i="AAA", sym_j="BBB"):
    """Aligned (mids_i, signs_i, signs_j) day lists for estimator tests."""
    mids_i, signs_i, signs_j = [], [], []
    for d in range(n_days):
        prefix = int(rng.integers(0, max(1, slots // 4)))
        mids_i.append(make_mid_series(random_mid_values(rng, slots, prefix), sym_i, d))
        signs_i.append(make_sign_series(random_sign_values(rng, slots), sym_i, d))
        signs_j.append(make_sign_series(random_sign_values(rng, slots), sym_j, d))
    return mids_i, signs_i, signs_j


def trades_from_rows(rows) -> list[TradeEvent]:
    """rows: (second, price) or (second, price, volume), file order."""
    seq: dict[int, int] = {}
    out = []
    for row in rows:
        sec, price = row[0], row[1]
        vol = row[2] if len(row) > 2 else 100
        seq[sec] = seq.get(sec, 0) + 1
        out.append(TradeEvent(sec, seq[sec], float(price), int(vol)))
    return out


def quotes_from_rows(rows) -> list[QuoteEvent]:
    """rows: (second, bid, ask), file order."""
    seq: dict[int, int] = {}
    out = []
    for sec, bid, ask in rows:
        seq[sec] = seq.get(sec, 0) + 1
        out.append(QuoteEvent(sec, seq[sec], float(bid), float(ask)))
    return out


@pytest.fixture
def small_grid():
    # 20-slot window starting on the default session open
    return IntradayGrid(34800, 34820)


@pytest.fixture
def rng():
    return np.random.default_rng(20080102)
