"""Pure-numpy reference kernels.

These are the default compute routines when the compiled extension is not
available. Accumulations run in extended precision (long double) so that
results stay within 1e-12 relative error of an exactly-summed reference
even under heavy cancellation.
"""

from __future__ import annotations

import numpy as np


def tick_rule_signs(prices: np.ndarray) -> np.ndarray:
    """Classify per-trade signs from consecutive price changes.

    A trade gets +1 if its price is above the previous trade's price, -1 if
    below, and the previous trade's sign if equal. Leading trades before the
    first price change are undefined and encoded as 0.

    Args:
        prices: Trade prices in sequence order, float64.

    Returns:
        int8 array of the same length with entries in {-1, 0, +1}; 0 only
        appears in the undefined leading run.
    """
    prices = np.asarray(prices, dtype=np.float64)
    n = prices.shape[0]
    out = np.zeros(n, dtype=np.int8)
    if n < 2:
        return out
    d = np.sign(np.diff(prices)).astype(np.int8)
    # index of the latest defined change at or before each trade, 0 if none
    pos = np.arange(1, n, dtype=np.int64)
    last = np.where(d != 0, pos, 0)
    np.maximum.accumulate(last, out=last)
    defined = last > 0
    out[1:][defined] = d[last[defined] - 1]
    return out


def lagged_product_sums(
    x: np.ndarray,
    eps: np.ndarray,
    lags: np.ndarray,
    count_all: bool = False,
):
    """Per-lag sums of lagged-difference times sign products for one day.

    For each lag tau, accumulates p(t) = (x[t+tau] - x[t]) * eps[t] over the
    sampled seconds t of a single day. A second is sampled when both x
    endpoints are finite and, unless count_all is set, eps[t] != 0.

    Args:
        x: Level series (log-midpoints), float64, NaN where undefined.
        eps: Sign series, integer entries in {-1, 0, +1}.
        lags: Positive integer lags, ascending.
        count_all: Sample every t with a defined difference, including
            eps[t] == 0 (which contributes a zero product but is counted).

    Returns:
        Tuple (sums, counts, sumsq): float64 sums of p, int64 sample counts,
        and float64 sums of p**2, one entry per lag.
    """
    x = np.asarray(x, dtype=np.float64)
    eps = np.asarray(eps)
    lags = np.asarray(lags, dtype=np.int64)
    n = x.shape[0]
    finite = np.isfinite(x)
    nlags = lags.shape[0]
    sums = np.zeros(nlags, dtype=np.float64)
    counts = np.zeros(nlags, dtype=np.int64)
    sumsq = np.zeros(nlags, dtype=np.float64)
    for k in range(nlags):
        tau = int(lags[k])
        if tau >= n:
            continue
        ok = finite[: n - tau] & finite[tau:]
        if not count_all:
            ok = ok & (eps[: n - tau] != 0)
        if not ok.any():
            continue
        r = x[tau:][ok] - x[: n - tau][ok]
        p = r * eps[: n - tau][ok]
        sums[k] = float(np.sum(p, dtype=np.longdouble))
        counts[k] = int(ok.sum())
        sumsq[k] = float(np.sum(p * p, dtype=np.longdouble))
    return sums, counts, sumsq


def sign_product_sums(
    eps_i: np.ndarray,
    eps_j: np.ndarray,
    lags: np.ndarray,
    count_all: bool = False,
):
    """Per-lag sums of lagged sign products eps_i[t+tau] * eps_j[t].

    Sampling matches lagged_product_sums: t runs over seconds with
    eps_j[t] != 0 unless count_all is set. Products are small integers, so
    the float64 sums are exact.

    Returns:
        Tuple (sums, counts): float64 sums and int64 sample counts per lag.
    """
    eps_i = np.asarray(eps_i, dtype=np.int64)
    eps_j = np.asarray(eps_j, dtype=np.int64)
    lags = np.asarray(lags, dtype=np.int64)
    n = eps_j.shape[0]
    nlags = lags.shape[0]
    sums = np.zeros(nlags, dtype=np.float64)
    counts = np.zeros(nlags, dtype=np.int64)
    for k in range(nlags):
        tau = int(lags[k])
        if tau >= n:
            continue
        head = eps_j[: n - tau]
        if count_all:
            m = n - tau
            s = int(np.dot(eps_i[tau:], head))
        else:
            ok = head != 0
            m = int(ok.sum())
            if m == 0:
                continue
            s = int(np.dot(eps_i[tau:][ok], head[ok]))
        sums[k] = float(s)
        counts[k] = m
    return sums, counts
