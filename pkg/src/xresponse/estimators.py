"""Lag statistics: price response, sign correlators, noise, and averages.

All estimators consume immutable per-day series restricted to a pair's
common trading days, accumulate per-day partial sums in a fixed order, and
average at the end. Lags with zero samples come out as NaN, never 0.

The averaging policy controls which seconds t enter the time average:
"nonzero" (default) uses only seconds where the impacting stock's sign is
nonzero; "all" uses every second with a defined return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import DataError
from .returns import MidpointSeries
from .signing import SignSeries

AVERAGING_POLICIES = ("nonzero", "all")

CURVE_KINDS = (
    "response",
    "sign_correlator",
    "response_noise",
    "averaged_response",
    "averaged_correlator",
)


@dataclass(frozen=True)
class LagCurve:
    """A statistic evaluated on an ascending grid of positive lags.

    Attributes:
        kind: One of CURVE_KINDS.
        stock_i: Responding/first stock symbol, or an aggregate tag.
        stock_j: Impacting/second stock symbol, or an aggregate tag.
        lags: int64 array, strictly increasing, entries >= 1.
        values: float64 array aligned to lags; NaN marks a lag with no
            samples.
        counts: int64 array of per-lag sample counts.
        product_std: Optional per-lag sample standard deviation of the
            averaged products (NaN where fewer than 2 samples); used for
            null-hypothesis error bands.
    """

    kind: str
    stock_i: str
    stock_j: str
    lags: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    product_std: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        lags = np.asarray(self.lags)
        if lags.size and (lags[0] < 1 or (np.diff(lags) <= 0).any()):
            raise ValueError("lags must be strictly increasing and >= 1")
        if not (len(self.lags) == len(self.values) == len(self.counts)):
            raise ValueError("lags, values, counts lengths differ")

    @property
    def empty(self) -> bool:
        return int(np.sum(self.counts)) == 0

    def value_at(self, tau: int) -> float:
        pos = np.nonzero(self.lags == tau)[0]
        if not pos.size:
            raise KeyError(f"lag {tau} not on curve grid")
        return float(self.values[pos[0]])

    def standard_errors(self) -> np.ndarray:
        """Per-lag standard error of the mean, NaN where unavailable."""
        if self.product_std is None:
            raise ValueError("curve carries no product spread")
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.product_std / np.sqrt(self.counts)


@dataclass(frozen=True)
class ResponseMatrix:
    """All-pairs response values at one fixed lag, raw and normalized.

    normalized = raw / normalizer with normalizer = max |raw| over every
    entry, diagonal included; when the normalizer is 0 (or no entry is
    defined) the matrix is degenerate and normalized is all-NaN.
    """

    tau: int
    symbols: tuple[str, ...]
    sectors: tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray
    normalizer: float

    def __post_init__(self):
        n = len(self.symbols)
        if self.raw.shape != (n, n) or self.normalized.shape != (n, n):
            raise ValueError("matrix shape does not match symbols")
        if len(self.sectors) != n:
            raise ValueError("one sector label per symbol required")

    @property
    def degenerate(self) -> bool:
        return not self.normalizer > 0

    @property
    def sector_boundaries(self) -> tuple[int, ...]:
        """Start index of each contiguous sector block."""
        bounds = []
        for idx, sec in enumerate(self.sectors):
            if idx == 0 or sec != self.sectors[idx - 1]:
                bounds.append(idx)
        return tuple(bounds)


def _check_policy(policy: str) -> bool:
    if policy not in AVERAGING_POLICIES:
        raise ValueError(f"averaging_policy must be one of {AVERAGING_POLICIES}")
    return policy == "all"


def _check_aligned(a: Sequence, b: Sequence, what: str) -> None:
    if len(a) != len(b):
        raise ValueError(f"{what}: day sequences have different lengths")
    for x, y in zip(a, b):
        if x.date != y.date:
            raise ValueError(f"{what}: day mismatch {x.date} vs {y.date}")


def _reduce_days(day_sums, day_counts, day_sumsq=None):
    """Combine per-day partials (fixed order) into value/count/std arrays."""
    sums = np.asarray(np.sum(day_sums, axis=0, dtype=np.longdouble), dtype=np.longdouble)
    counts = np.sum(day_counts, axis=0, dtype=np.int64)
    values = np.full(counts.shape, np.nan, dtype=np.float64)
    have = counts > 0
    values[have] = (sums[have] / counts[have]).astype(np.float64)
    std = None
    if day_sumsq is not None:
        sumsq = np.asarray(
            np.sum(day_sumsq, axis=0, dtype=np.longdouble), dtype=np.longdouble
        )
        std = np.full(counts.shape, np.nan, dtype=np.float64)
        two = counts > 1
        var = (sumsq[two] - sums[two] * sums[two] / counts[two]) / (counts[two] - 1)
        std[two] = np.sqrt(np.maximum(var, 0.0)).astype(np.float64)
    return values, counts, std


def _response_day_partials(
    mids_i: Sequence[MidpointSeries],
    signs_j: Sequence[SignSeries],
    lags: np.ndarray,
    count_all: bool,
):
    n_days = len(mids_i)
    nlags = len(lags)
    day_sums = np.zeros((n_days, nlags), dtype=np.float64)
    day_counts = np.zeros((n_days, nlags), dtype=np.int64)
    day_sumsq = np.zeros((n_days, nlags), dtype=np.float64)
    for d, (m, s) in enumerate(zip(mids_i, signs_j)):
        day_sums[d], day_counts[d], day_sumsq[d] = _kernels.lagged_product_sums(
            m.log_values(), s.values, lags, count_all
        )
    return day_sums, day_counts, day_sumsq


def cross_response(
    mids_i: Sequence[MidpointSeries],
    signs_j: Sequence[SignSeries],
    lags,
    averaging_policy: str = "nonzero",
) -> LagCurve:
    """Average lagged return of stock i against the trade sign of stock j.

    For each lag tau this is the time average of r_i(t, tau) * eps_j(t)
    over the pair's common days. i == j gives the self-response.

    Args:
        mids_i: Midpoint series of the responding stock, one per common
            day, date order.
        signs_j: Sign series of the impacting stock, aligned to mids_i.
        lags: Ascending positive lags in seconds.
        averaging_policy: "nonzero" or "all", see module docstring.

    Returns:
        LagCurve of kind "response" with per-lag sample counts and product
        spread. Empty input yields an all-NaN curve flagged via `.empty`.
    """
    count_all = _check_policy(averaging_policy)
    _check_aligned(mids_i, signs_j, "cross_response")
    lags = np.asarray(lags, dtype=np.int64)
    day_sums, day_counts, day_sumsq = _response_day_partials(
        mids_i, signs_j, lags, count_all
    )
    values, counts, std = _reduce_days(day_sums, day_counts, day_sumsq)
    return LagCurve(
        kind="response",
        stock_i=mids_i[0].symbol if mids_i else "",
        stock_j=signs_j[0].symbol if signs_j else "",
        lags=lags,
        values=values,
        counts=counts,
        product_std=std,
    )


def sign_correlator(
    signs_i: Sequence[SignSeries],
    signs_j: Sequence[SignSeries],
    lags,
    averaging_policy: str = "nonzero",
    with_spread: bool = True,
) -> LagCurve:
    """Average lagged sign product eps_i(t+tau) * eps_j(t) per lag.

    Sampling matches cross_response: seconds with eps_j(t) != 0 under the
    default policy. A zero eps_i(t+tau) contributes a zero product.
    """
    count_all = _check_policy(averaging_policy)
    _check_aligned(signs_i, signs_j, "sign_correlator")
    lags = np.asarray(lags, dtype=np.int64)
    n_days = len(signs_i)
    nlags = len(lags)
    day_sums = np.zeros((n_days, nlags), dtype=np.float64)
    day_counts = np.zeros((n_days, nlags), dtype=np.int64)
    day_sumsq = np.zeros((n_days, nlags), dtype=np.float64) if with_spread else None
    for d, (si, sj) in enumerate(zip(signs_i, signs_j)):
        day_sums[d], day_counts[d] = _kernels.sign_product_sums(
            si.values, sj.values, lags, count_all
        )
        if with_spread:
            # squared products are the nonzero-product indicators
            day_sumsq[d], _ = _kernels.sign_product_sums(
                np.abs(si.values), np.abs(sj.values), lags, count_all
            )
    values, counts, std = _reduce_days(day_sums, day_counts, day_sumsq)
    return LagCurve(
        kind="sign_correlator",
        stock_i=signs_i[0].symbol if signs_i else "",
        stock_j=signs_j[0].symbol if signs_j else "",
        lags=lags,
        values=values,
        counts=counts,
        product_std=std,
    )


def response_noise(
    mids_i: Sequence[MidpointSeries],
    signs_j: Sequence[SignSeries],
    lags,
    averaging_policy: str = "nonzero",
) -> LagCurve:
    """Relative odd/even-day instability of the pair response.

    Common days are labeled 1..T in date order; the response is estimated
    separately over odd and even labels and over all days, and the noise is
    the normalized distance sqrt(0.5 * sum_k (R_k - R)^2) / |R|. Lags where
    R is 0 or any sub-estimate is missing come out NaN.

    Raises:
        DataError: With fewer than two common days the split is impossible.
    """
    count_all = _check_policy(averaging_policy)
    _check_aligned(mids_i, signs_j, "response_noise")
    if len(mids_i) < 2:
        raise DataError("response noise needs at least two common days")
    lags = np.asarray(lags, dtype=np.int64)
    day_sums, day_counts, _ = _response_day_partials(mids_i, signs_j, lags, count_all)

    def half(rows):
        s = np.asarray(np.sum(rows[0], axis=0, dtype=np.longdouble), dtype=np.longdouble)
        c = np.sum(rows[1], axis=0, dtype=np.int64)
        return s, c

    odd_s, odd_c = half((day_sums[0::2], day_counts[0::2]))
    even_s, even_c = half((day_sums[1::2], day_counts[1::2]))

    def mean(s, c):
        out = np.full(len(lags), np.nan, dtype=np.float64)
        have = c > 0
        out[have] = (s[have] / c[have]).astype(np.float64)
        return out

    r_odd = mean(odd_s, odd_c)
    r_even = mean(even_s, even_c)
    r_all = mean(odd_s + even_s, odd_c + even_c)

    values = np.full(len(lags), np.nan, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        dist = np.sqrt(0.5 * ((r_odd - r_all) ** 2 + (r_even - r_all) ** 2))
        ok = np.isfinite(dist) & np.isfinite(r_all) & (r_all != 0.0)
        values[ok] = dist[ok] / np.abs(r_all[ok])
    return LagCurve(
        kind="response_noise",
        stock_i=mids_i[0].symbol,
        stock_j=signs_j[0].symbol,
        lags=lags,
        values=values,
        counts=odd_c + even_c,
    )


def _mean_of_curves(
    curves: Sequence[LagCurve], kind: str, stock_i: str, stock_j: str
) -> LagCurve:
    """Equal-weight per-lag mean over curves, skipping missing values."""
    if not curves:
        raise DataError("cannot average an empty pool of curves")
    lags = curves[0].lags
    for c in curves[1:]:
        if not np.array_equal(c.lags, lags):
            raise ValueError("curves share no common lag grid")
    stack = np.stack([c.values for c in curves])
    cnts = np.stack([c.counts for c in curves])
    have = np.isfinite(stack)
    n_contrib = have.sum(axis=0)
    sums = np.nansum(np.asarray(stack, dtype=np.longdouble), axis=0)
    values = np.full(len(lags), np.nan, dtype=np.float64)
    nz = n_contrib > 0
    values[nz] = (sums[nz] / n_contrib[nz]).astype(np.float64)
    counts = np.where(have, cnts, 0).sum(axis=0)
    return LagCurve(
        kind=kind,
        stock_i=stock_i,
        stock_j=stock_j,
        lags=lags.copy(),
        values=values,
        counts=counts,
    )


def market_average_response(
    pair_curves: Mapping[tuple[str, str], LagCurve], symbols: Sequence[str]
) -> LagCurve:
    """Two-stage market mean: over impacting stocks j != i, then over i.

    The literal two-stage mean differs from a flat mean over all ordered
    pairs when rows contribute unequal numbers of defined values, so the
    inner means are formed explicitly per responding stock.

    The returned counts are the summed sample counts of every contributing
    pair.
    """
    inner = []
    for i in symbols:
        pool = [
            pair_curves[(i, j)]
            for j in symbols
            if j != i and (i, j) in pair_curves
        ]
        if pool:
            inner.append(_mean_of_curves(pool, "averaged_response", i, "market"))
    if not inner:
        raise DataError("no off-diagonal pair curves supplied")
    out = _mean_of_curves(inner, "averaged_response", "market", "market")
    return out


def market_average_correlator(
    pair_curves: Mapping[tuple[str, str], LagCurve], symbols: Sequence[str]
) -> LagCurve:
    """Two-stage market mean of pair sign correlators, i = j excluded."""
    inner = []
    for i in symbols:
        pool = [
            pair_curves[(i, j)]
            for j in symbols
            if j != i and (i, j) in pair_curves
        ]
        if pool:
            inner.append(_mean_of_curves(pool, "averaged_correlator", i, "market"))
    if not inner:
        raise DataError("no off-diagonal pair curves supplied")
    return _mean_of_curves(inner, "averaged_correlator", "market", "market")


def passive_response(stock: str, pool_curves: Sequence[LagCurve]) -> LagCurve:
    """Mean response of one stock to the trades of a pool (self excluded).

    Args:
        stock: The responding stock i.
        pool_curves: Pair curves R_i,j for j in the pool, j != i.
    """
    for c in pool_curves:
        if c.stock_i != stock or c.stock_j == stock:
            raise ValueError("passive pool must hold curves (stock, j != stock)")
    return _mean_of_curves(pool_curves, "averaged_response", stock, "pool")


def active_response(stock: str, pool_curves: Sequence[LagCurve]) -> LagCurve:
    """Mean response of a pool to the trades of one stock (self excluded)."""
    for c in pool_curves:
        if c.stock_j != stock or c.stock_i == stock:
            raise ValueError("active pool must hold curves (i != stock, stock)")
    return _mean_of_curves(pool_curves, "averaged_response", "pool", stock)


def passive_correlator(stock: str, pool_curves: Sequence[LagCurve]) -> LagCurve:
    """Mean sign correlator of one stock's lagged sign against a pool."""
    for c in pool_curves:
        if c.stock_i != stock or c.stock_j == stock:
            raise ValueError("passive pool must hold curves (stock, j != stock)")
    return _mean_of_curves(pool_curves, "averaged_correlator", stock, "pool")


def active_correlator(stock: str, pool_curves: Sequence[LagCurve]) -> LagCurve:
    """Mean sign correlator of a pool's lagged signs against one stock."""
    for c in pool_curves:
        if c.stock_j != stock or c.stock_i == stock:
            raise ValueError("active pool must hold curves (i != stock, stock)")
    return _mean_of_curves(pool_curves, "averaged_correlator", "pool", stock)


def market_response_matrix(
    raw: np.ndarray,
    symbols: Sequence[str],
    sectors: Sequence[str],
    tau: int,
) -> ResponseMatrix:
    """Normalize an all-pairs response matrix by its largest magnitude.

    Args:
        raw: N x N response values at the fixed lag, row = responding stock,
            column = impacting stock; NaN where a pair is undefined.
        symbols: Stock order of rows/columns, grouped by sector.
        sectors: Sector label per symbol.
        tau: The fixed lag in seconds.

    Returns:
        ResponseMatrix; when every entry is 0 or undefined the normalized
        side is all-NaN and `.degenerate` is set.
    """
    raw = np.asarray(raw, dtype=np.float64)
    finite = np.isfinite(raw)
    normalizer = float(np.max(np.abs(raw[finite]))) if finite.any() else 0.0
    if normalizer > 0:
        normalized = raw / normalizer
    else:
        normalized = np.full_like(raw, np.nan)
    return ResponseMatrix(
        tau=int(tau),
        symbols=tuple(symbols),
        sectors=tuple(sectors),
        raw=raw,
        normalized=normalized,
        normalizer=normalizer,
    )


def rank_by_response(
    values_by_symbol: Mapping[str, np.ndarray],
    lags: Sequence[int],
    k: int = 15,
    primary_lag: int | None = None,
) -> list[tuple[str, np.ndarray]]:
    """Top-k stocks by normalized averaged response at a primary lag.

    Args:
        values_by_symbol: Per-symbol value arrays aligned to `lags`
            (already normalized).
        lags: The lag grid of the value arrays.
        k: Number of stocks to return; larger than the universe returns the
            whole universe, 0 returns nothing.
        primary_lag: Lag whose value orders the list; defaults to the
            largest lag present. Ties break alphabetically; missing values
            rank last.

    Returns:
        List of (symbol, values) in descending order of the primary value.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    lags = list(int(x) for x in lags)
    if primary_lag is None:
        primary_lag = max(lags)
    if primary_lag not in lags:
        raise ValueError(f"primary lag {primary_lag} not in lag set {lags}")
    pos = lags.index(primary_lag)

    def sort_key(item):
        sym, vals = item
        v = float(vals[pos])
        if math.isnan(v):
            v = -math.inf
        return (-v, sym)

    ordered = sorted(values_by_symbol.items(), key=sort_key)
    return [(sym, np.asarray(vals, dtype=np.float64)) for sym, vals in ordered[:k]]
