"""Stock universe: symbols with sector labels and capitalization metadata.

The default roster is the bundled 2008 large-cap list: 99 stocks across
ten economic sectors (I, HC, CD, IT, U, F, M, E, CS, TS). Capitalization
is carried along as metadata only; no estimator reads it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources

from .errors import DataError

DEFAULT_UNIVERSE_RESOURCE = "data/sp500_universe_2008.csv"

SECTOR_CODES = ("I", "HC", "CD", "IT", "U", "F", "M", "E", "CS", "TS")

SECTOR_NAMES = {
    "I": "industrials",
    "HC": "health care",
    "CD": "consumer discretionary",
    "IT": "information technology",
    "U": "utilities",
    "F": "financials",
    "M": "materials",
    "E": "energy",
    "CS": "consumer staples",
    "TS": "telecommunications services",
}


@dataclass(frozen=True)
class StockInfo:
    symbol: str
    sector: str
    company: str = ""
    avg_market_cap: float = float("nan")


@dataclass(frozen=True)
class Universe:
    """Ordered roster of stocks; order defines matrix row/column layout."""

    stocks: tuple[StockInfo, ...]
    _by_symbol: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = {}
        for s in self.stocks:
            if s.symbol in seen:
                raise DataError(f"duplicate symbol in universe: {s.symbol}")
            seen[s.symbol] = s
        object.__setattr__(self, "_by_symbol", seen)

    def __len__(self) -> int:
        return len(self.stocks)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s.symbol for s in self.stocks)

    @property
    def sectors(self) -> tuple[str, ...]:
        return tuple(s.sector for s in self.stocks)

    def sector_of(self, symbol: str) -> str:
        try:
            return self._by_symbol[symbol].sector
        except KeyError:
            raise DataError(f"unknown symbol: {symbol}") from None

    def info(self, symbol: str) -> StockInfo:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise DataError(f"unknown symbol: {symbol}") from None

    def restrict(self, symbols) -> "Universe":
        """Sub-universe in the given symbol order."""
        return Universe(stocks=tuple(self.info(s) for s in symbols))


def parse_universe_csv(text: str) -> Universe:
    reader = csv.DictReader(io.StringIO(text))
    required = {"symbol", "sector"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise DataError("universe file needs at least columns: symbol,sector")
    stocks = []
    for row in reader:
        sym = (row["symbol"] or "").strip()
        sec = (row["sector"] or "").strip()
        if not sym or not sec:
            raise DataError(f"universe row missing symbol or sector: {row}")
        cap = float("nan")
        raw_cap = (row.get("avg_market_cap") or "").strip()
        if raw_cap:
            try:
                cap = float(raw_cap)
            except ValueError:
                raise DataError(f"bad avg_market_cap for {sym}: {raw_cap!r}") from None
        stocks.append(
            StockInfo(
                symbol=sym,
                sector=sec,
                company=(row.get("company") or "").strip(),
                avg_market_cap=cap,
            )
        )
    if not stocks:
        raise DataError("universe file has no rows")
    return Universe(stocks=tuple(stocks))


def load_universe(path: str | None = None) -> Universe:
    """Load a universe CSV; None loads the bundled 99-stock roster."""
    if path is None:
        text = (
            resources.files("xresponse")
            .joinpath(DEFAULT_UNIVERSE_RESOURCE)
            .read_text(encoding="utf-8")
        )
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read universe file {path}: {exc}") from None
    return parse_universe_csv(text)
