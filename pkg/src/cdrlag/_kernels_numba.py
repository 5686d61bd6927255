"""Numba-compiled hot kernels; selected through :mod:`cdrlag.kernels`."""

import numpy as np
from numba import njit

from . import _scalar

BACKEND = "numba"

ks_asymptotic_sf = njit(cache=True)(_scalar.ks_asymptotic_sf)
gamma_q = njit(cache=True)(_scalar.gamma_q)
_logpdf1 = njit(cache=True)(_scalar.exgauss_logpdf1)


@njit(cache=True)
def backward_match(net_sub, net_ts, net_pair, cdr_sub, cdr_ts, cdr_pair, n_pairs):
    """Single forward sweep over both streams sorted by (subscriber, timestamp).

    ``net_pair``/``cdr_pair`` are dense codes of (subscriber, cell) pairs, so
    a last-seen timestamp per pair code implements the backward search.
    Returns (matched mask, error seconds) aligned with the CDR stream.
    """
    last_ts = np.full(n_pairs, -1, np.int64)
    n_net = net_ts.shape[0]
    n_cdr = cdr_ts.shape[0]
    matched = np.zeros(n_cdr, np.bool_)
    err = np.zeros(n_cdr, np.int64)
    j = 0
    for i in range(n_cdr):
        s = cdr_sub[i]
        t = cdr_ts[i]
        while j < n_net and (net_sub[j] < s or (net_sub[j] == s and net_ts[j] <= t)):
            last_ts[net_pair[j]] = net_ts[j]
            j += 1
        lt = last_ts[cdr_pair[i]]
        if lt >= 0:
            matched[i] = True
            err[i] = t - lt
    return matched, err


@njit(cache=True)
def ks_statistic(a, b):
    """Two-sample KS statistic for sorted samples, exact under ties.

    Merged sweep that only evaluates the CDF gap after advancing through all
    values equal to the current threshold on both sides.
    """
    na = a.shape[0]
    nb = b.shape[0]
    i = 0
    j = 0
    d = 0.0
    while i < na and j < nb:
        if a[i] <= b[j]:
            m = a[i]
        else:
            m = b[j]
        while i < na and a[i] <= m:
            i += 1
        while j < nb and b[j] <= m:
            j += 1
        gap = abs(i / na - j / nb)
        if gap > d:
            d = gap
    return d


@njit(cache=True)
def exgauss_logpdf(x, mu, sigma, tau):
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        out[i] = _logpdf1(x[i], mu, sigma, tau)
    return out


@njit(cache=True)
def exgauss_nll(x, mu, sigma, tau):
    total = 0.0
    for i in range(x.shape[0]):
        total += _logpdf1(x[i], mu, sigma, tau)
    return -total
