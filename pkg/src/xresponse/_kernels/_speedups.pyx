# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Semantics match _fallback exactly; see its docstrings.

Response sums accumulate in long double so both backends agree with an
exactly-summed reference to well below 1e-12 relative error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()


def tick_rule_signs(object prices_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] prices = np.ascontiguousarray(
        prices_in, dtype=np.float64
    )
    cdef Py_ssize_t n = prices.shape[0]
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.zeros(n, dtype=np.int8)
    cdef Py_ssize_t k
    cdef signed char cur = 0
    cdef double prev, p
    if n < 2:
        return out
    prev = prices[0]
    for k in range(1, n):
        p = prices[k]
        if p > prev:
            cur = 1
        elif p < prev:
            cur = -1
        # equal price keeps cur (0 while still undefined)
        out[k] = cur
        prev = p
    return out


def lagged_product_sums(object x_in, object eps_in, object lags_in,
                        bint count_all=False):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.ascontiguousarray(
        x_in, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.int8_t, ndim=1] eps = np.ascontiguousarray(
        eps_in, dtype=np.int8
    )
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lags = np.ascontiguousarray(
        lags_in, dtype=np.int64
    )
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nlags = lags.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sums = np.zeros(nlags, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(nlags, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sumsq = np.zeros(nlags, dtype=np.float64)
    cdef Py_ssize_t k, t, tau
    cdef long double acc, accsq
    cdef long long cnt
    cdef double r, p
    cdef signed char e
    for k in range(nlags):
        tau = lags[k]
        if tau >= n:
            continue
        acc = 0.0
        accsq = 0.0
        cnt = 0
        for t in range(n - tau):
            e = eps[t]
            if e == 0 and not count_all:
                continue
            if not isfinite(x[t]) or not isfinite(x[t + tau]):
                continue
            r = x[t + tau] - x[t]
            p = r * e
            acc += p
            accsq += p * p
            cnt += 1
        sums[k] = <double> acc
        counts[k] = cnt
        sumsq[k] = <double> accsq
    return sums, counts, sumsq


def sign_product_sums(object eps_i_in, object eps_j_in, object lags_in,
                      bint count_all=False):
    cdef cnp.ndarray[cnp.int8_t, ndim=1] eps_i = np.ascontiguousarray(
        eps_i_in, dtype=np.int8
    )
    cdef cnp.ndarray[cnp.int8_t, ndim=1] eps_j = np.ascontiguousarray(
        eps_j_in, dtype=np.int8
    )
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lags = np.ascontiguousarray(
        lags_in, dtype=np.int64
    )
    cdef Py_ssize_t n = eps_j.shape[0]
    cdef Py_ssize_t nlags = lags.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sums = np.zeros(nlags, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(nlags, dtype=np.int64)
    cdef Py_ssize_t k, t, tau
    cdef long long s, cnt
    cdef signed char ej
    for k in range(nlags):
        tau = lags[k]
        if tau >= n:
            continue
        s = 0
        cnt = 0
        for t in range(n - tau):
            ej = eps_j[t]
            if ej == 0:
                if count_all:
                    cnt += 1
                continue
            s += eps_i[t + tau] * ej
            cnt += 1
        sums[k] = <double> s
        counts[k] = cnt
    return sums, counts
