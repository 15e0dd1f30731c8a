"""Trade sign classification and per-second aggregation.

A trade's sign is the sign of the price change from the previous trade of
the same day; an unchanged price inherits the previous trade's sign. Signs
are then aggregated per second to a single value in {-1, 0, +1}: the sign
of the sum, with 0 for tradeless or balanced seconds.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .grid import IntradayGrid
from .ingest import TradeEvent

CARRY_POLICIES = ("none",)


@dataclass(frozen=True)
class TradeSignSeries:
    """Per-trade signs aligned to one day's trade sequence.

    Attributes:
        signs: int8 array; +1 buy, -1 sell, 0 undefined. Zeros only occur in
            the leading run before the day's first price change.
        undefined_prefix: Length of that leading run.
    """

    signs: np.ndarray
    undefined_prefix: int

    def __post_init__(self):
        nz = np.nonzero(self.signs)[0]
        first = int(nz[0]) if nz.size else len(self.signs)
        if first != self.undefined_prefix or (self.signs[first:] == 0).any():
            raise ValueError("zeros allowed only as the undefined leading run")


@dataclass(frozen=True)
class SignSeries:
    """Aggregated per-second signs for one stock-day on the intraday grid."""

    symbol: str
    date: dt.date
    values: np.ndarray  # int8, length grid.size, entries in {-1, 0, +1}

    @property
    def buy_seconds(self) -> int:
        return int((self.values == 1).sum())

    @property
    def sell_seconds(self) -> int:
        return int((self.values == -1).sum())

    @property
    def zero_seconds(self) -> int:
        return int((self.values == 0).sum())


def classify_trade_signs(
    trades: Sequence[TradeEvent], carry_policy: str = "none"
) -> TradeSignSeries:
    """Sign every trade of one day from consecutive price changes.

    The comparison runs across the whole day's trade sequence, crossing
    second boundaries. With carry_policy "none" (the only policy), the day
    starts unsigned: trades before the first intraday price change are
    undefined and later contribute nothing to per-second sums.

    Args:
        trades: One day's trades, sorted by (second, seq).
        carry_policy: Handling of the day's leading unsigned trades.

    Returns:
        TradeSignSeries aligned to the input order.
    """
    if carry_policy not in CARRY_POLICIES:
        raise ValueError(f"unknown carry_policy {carry_policy!r}")
    prices = np.fromiter((t.price for t in trades), dtype=np.float64, count=len(trades))
    signs = _kernels.tick_rule_signs(prices)
    nz = np.nonzero(signs)[0]
    prefix = int(nz[0]) if nz.size else len(signs)
    return TradeSignSeries(signs=signs, undefined_prefix=prefix)


def aggregate_second_signs(
    trade_signs: TradeSignSeries,
    trades: Sequence[TradeEvent],
    grid: IntradayGrid,
    symbol: str = "",
    date: dt.date | None = None,
) -> SignSeries:
    """Collapse per-trade signs to one sign per grid second.

    Each second gets the sign of the sum of its defined trade signs:
    0 when the second has no trades, only undefined trades, or a balanced
    sum.

    Args:
        trade_signs: Output of classify_trade_signs for these trades.
        trades: The same day's trades (for timestamps).
        grid: Intraday grid; trades outside its window are ignored.
        symbol: Stock symbol stamped on the result.
        date: Calendar day stamped on the result.

    Returns:
        SignSeries of length grid.size.
    """
    if len(trades) != len(trade_signs.signs):
        raise ValueError("trade_signs and trades lengths differ")
    seconds = np.fromiter(
        (t.second_of_day for t in trades), dtype=np.int64, count=len(trades)
    )
    signs = trade_signs.signs.astype(np.int64)
    inside = (seconds >= grid.start_second) & (seconds < grid.end_second)
    slots = seconds[inside] - grid.start_second
    sums = np.bincount(slots, weights=signs[inside], minlength=grid.size)
    values = np.sign(sums).astype(np.int8)
    return SignSeries(
        symbol=symbol,
        date=date if date is not None else dt.date.min,
        values=values,
    )


def sign_day(
    trades: Sequence[TradeEvent],
    grid: IntradayGrid,
    symbol: str = "",
    date: dt.date | None = None,
    carry_policy: str = "none",
) -> tuple[SignSeries, TradeSignSeries]:
    """Classify and aggregate in one step for one stock-day."""
    per_trade = classify_trade_signs(trades, carry_policy=carry_policy)
    per_second = aggregate_second_signs(per_trade, trades, grid, symbol, date)
    return per_second, per_trade
