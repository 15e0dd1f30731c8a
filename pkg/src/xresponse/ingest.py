"""Parsing and validation of trades/quotes files.

Input files are delimited text with one event per row. Trades carry
`date,time,price,volume`, quotes carry `date,time,bid,ask`; the delimiter,
header presence, and column order are configurable through a schema
descriptor. Timestamps have one-second resolution; rows sharing a second
are ordered by their position in the file.
"""

from __future__ import annotations

import datetime as dt
import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import DataError
from .grid import IntradayGrid, format_hms, parse_hms

TRADE_COLUMNS = ("date", "time", "price", "volume")
QUOTE_COLUMNS = ("date", "time", "bid", "ask")

Kind = Literal["trades", "quotes"]


@dataclass(frozen=True)
class TradeEvent:
    """One executed trade at one-second timestamp resolution.

    Attributes:
        second_of_day: Seconds since midnight, exchange local time.
        seq_in_second: 1-based order among same-second events of the day.
        price: Trade price, > 0.
        volume: Shares, > 0.
    """

    second_of_day: int
    seq_in_second: int
    price: float
    volume: int


@dataclass(frozen=True)
class QuoteEvent:
    """One best bid/ask update; ask >= bid > 0."""

    second_of_day: int
    seq_in_second: int
    bid: float
    ask: float

    @property
    def midpoint(self) -> float:
        return (self.bid + self.ask) / 2


@dataclass(frozen=True)
class TickDay:
    """All events of one stock on one calendar day."""

    stock_symbol: str
    date: dt.date
    trades: tuple[TradeEvent, ...] = ()
    quotes: tuple[QuoteEvent, ...] = ()


@dataclass(frozen=True)
class TickFileSchema:
    """Describes the physical layout of a trades or quotes file.

    Attributes:
        delimiter: Field separator.
        has_header: Whether the first line names the columns. When true the
            header must match the column set for the file kind.
        columns: Field order in the file; None means the default order for
            the kind (date,time,price,volume / date,time,bid,ask).
    """

    delimiter: str = ","
    has_header: bool = True
    columns: tuple[str, ...] | None = None

    def columns_for(self, kind: Kind) -> tuple[str, ...]:
        expected = TRADE_COLUMNS if kind == "trades" else QUOTE_COLUMNS
        if self.columns is None:
            return expected
        if sorted(self.columns) != sorted(expected):
            raise DataError(
                f"schema columns {self.columns} do not cover {expected} for {kind}"
            )
        return tuple(self.columns)

    @classmethod
    def from_dict(cls, d: dict) -> "TickFileSchema":
        cols = d.get("columns")
        return cls(
            delimiter=d.get("delimiter", ","),
            has_header=bool(d.get("has_header", True)),
            columns=tuple(cols) if cols is not None else None,
        )

    def to_dict(self) -> dict:
        out: dict = {"delimiter": self.delimiter, "has_header": self.has_header}
        if self.columns is not None:
            out["columns"] = list(self.columns)
        return out


@dataclass
class ParseReport:
    """Row accounting for one parsed file."""

    kind: str = ""
    total_rows: int = 0
    accepted_rows: int = 0
    rejected_rows: int = 0
    rejects_by_reason: dict[str, int] = field(default_factory=dict)
    n_days: int = 0

    def reject(self, reason: str) -> None:
        self.rejected_rows += 1
        self.rejects_by_reason[reason] = self.rejects_by_reason.get(reason, 0) + 1

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "total_rows": self.total_rows,
            "accepted_rows": self.accepted_rows,
            "rejected_rows": self.rejected_rows,
            "rejects_by_reason": dict(sorted(self.rejects_by_reason.items())),
            "n_days": self.n_days,
        }


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def _open_source(source) -> io.TextIOBase:
    if isinstance(source, (str, Path)):
        return open(source, "r", newline="")
    return source


def parse_tick_file(
    source,
    symbol: str,
    schema: TickFileSchema | None = None,
    kind: Kind = "trades",
) -> tuple[list[TickDay], ParseReport]:
    """Parse a delimited trades or quotes file into per-day event lists.

    Rows that violate invariants (bad fields, non-positive price/volume,
    crossed quotes, timestamps running backwards within a day) are dropped
    and counted in the report. An unusable header is fatal.

    Args:
        source: Path or text file object.
        symbol: Stock symbol recorded on the produced days.
        schema: Physical layout; defaults to headered comma-separated files
            in the standard column order.
        kind: "trades" or "quotes".

    Returns:
        (days, report): days sorted by date with events in file order per
        (second, seq); the report counts accepted and rejected rows.

    Raises:
        DataError: If the header does not match the schema.
    """
    if kind not in ("trades", "quotes"):
        raise ValueError(f"kind must be trades or quotes, got {kind!r}")
    schema = schema or TickFileSchema()
    columns = schema.columns_for(kind)
    report = ParseReport(kind=kind)

    fh = _open_source(source)
    close = isinstance(source, (str, Path))
    try:
        lines = iter(fh)
        if schema.has_header:
            try:
                header = next(lines)
            except StopIteration:
                return [], report
            names = tuple(h.strip().lower() for h in header.rstrip("\n").split(schema.delimiter))
            if names != columns:
                raise DataError(
                    f"unparseable header: expected {columns}, found {names}"
                )
        col_idx = {name: i for i, name in enumerate(columns)}
        ncols = len(columns)

        by_day: dict[dt.date, list] = {}
        last_second: dict[dt.date, int] = {}
        seq_counter: dict[tuple[dt.date, int], int] = {}

        for line in lines:
            line = line.rstrip("\n")
            if not line:
                continue
            report.total_rows += 1
            fields = line.split(schema.delimiter)
            if len(fields) != ncols:
                report.reject("malformed")
                continue
            try:
                day = _parse_date(fields[col_idx["date"]])
                second = parse_hms(fields[col_idx["time"]].strip())
                if kind == "trades":
                    price = float(fields[col_idx["price"]])
                    volume = int(fields[col_idx["volume"]])
                else:
                    bid = float(fields[col_idx["bid"]])
                    ask = float(fields[col_idx["ask"]])
            except (ValueError, KeyError):
                report.reject("malformed")
                continue

            if kind == "trades":
                if not (price > 0 and np.isfinite(price)) or volume <= 0:
                    report.reject("nonpositive_field")
                    continue
            else:
                if not (bid > 0 and np.isfinite(bid) and np.isfinite(ask)):
                    report.reject("nonpositive_field")
                    continue
                if ask < bid:
                    report.reject("crossed_quote")
                    continue

            if second < last_second.get(day, -1):
                report.reject("non_monotone_timestamp")
                continue
            last_second[day] = second

            key = (day, second)
            seq = seq_counter.get(key, 0) + 1
            seq_counter[key] = seq
            if kind == "trades":
                event = TradeEvent(second, seq, price, volume)
            else:
                event = QuoteEvent(second, seq, bid, ask)
            by_day.setdefault(day, []).append(event)
            report.accepted_rows += 1
    finally:
        if close:
            fh.close()

    days = []
    for day in sorted(by_day):
        events = tuple(by_day[day])
        if kind == "trades":
            days.append(TickDay(symbol, day, trades=events))
        else:
            days.append(TickDay(symbol, day, quotes=events))
    report.n_days = len(days)
    return days, report


def serialize_tick_days(
    days: Iterable[TickDay],
    kind: Kind,
    schema: TickFileSchema | None = None,
) -> str:
    """Render days back to the delimited text form parse_tick_file reads.

    Floats are written with repr so a parse/serialize/parse cycle is
    value-identical.
    """
    schema = schema or TickFileSchema()
    columns = schema.columns_for(kind)
    out: list[str] = []
    if schema.has_header:
        out.append(schema.delimiter.join(columns))
    for day in days:
        events = day.trades if kind == "trades" else day.quotes
        for ev in events:
            fields = {
                "date": day.date.isoformat(),
                "time": format_hms(ev.second_of_day),
            }
            if kind == "trades":
                fields["price"] = repr(ev.price)
                fields["volume"] = str(ev.volume)
            else:
                fields["bid"] = repr(ev.bid)
                fields["ask"] = repr(ev.ask)
            out.append(schema.delimiter.join(fields[c] for c in columns))
    return "\n".join(out) + ("\n" if out else "")


def merge_tick_days(
    trade_days: Sequence[TickDay], quote_days: Sequence[TickDay]
) -> list[TickDay]:
    """Combine separately parsed trades and quotes into unified days.

    A date present in either input appears in the output; symbols must
    agree.
    """
    by_date: dict[dt.date, TickDay] = {}
    symbol = None
    for day in list(trade_days) + list(quote_days):
        if symbol is None:
            symbol = day.stock_symbol
        elif day.stock_symbol != symbol:
            raise DataError(
                f"cannot merge days of {day.stock_symbol} into {symbol}"
            )
        cur = by_date.get(day.date)
        if cur is None:
            by_date[day.date] = day
        else:
            by_date[day.date] = TickDay(
                symbol,
                day.date,
                trades=cur.trades or day.trades,
                quotes=cur.quotes or day.quotes,
            )
    return [by_date[d] for d in sorted(by_date)]


def clip_to_grid(day: TickDay, grid: IntradayGrid) -> TickDay:
    """Drop events outside the half-open session window. Idempotent."""
    trades = tuple(t for t in day.trades if grid.contains(t.second_of_day))
    quotes = tuple(q for q in day.quotes if grid.contains(q.second_of_day))
    return replace(day, trades=trades, quotes=quotes)


@dataclass(frozen=True)
class CommonDays:
    """Sorted common trading days of a pair, labeled 1..T in date order.

    Odd labels form the first half of the even/odd split, even labels the
    second.
    """

    dates: tuple[dt.date, ...]

    @property
    def count(self) -> int:
        return len(self.dates)

    @property
    def empty(self) -> bool:
        return not self.dates

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, len(self.dates) + 1))

    def odd_dates(self) -> tuple[dt.date, ...]:
        return self.dates[0::2]

    def even_dates(self) -> tuple[dt.date, ...]:
        return self.dates[1::2]


def common_days(days_i: Iterable[dt.date], days_j: Iterable[dt.date]) -> CommonDays:
    """Sorted intersection of two stocks' trading-day sets.

    An empty intersection is a valid result; callers check `.empty`.
    """
    inter = set(days_i) & set(days_j)
    return CommonDays(dates=tuple(sorted(inter)))


def trading_dates(days: Iterable[TickDay]) -> set[dt.date]:
    """Dates on which the stock traded at least once.

    A day with quotes but no trades does not count as a trading day.
    """
    return {d.date for d in days if d.trades}
