"""Scalar numerical routines shared by both kernel backends.

Every function is plain Python over floats with no cross-module calls, so the
numba backend can compile each one unchanged with ``njit`` while the numpy
backend calls them directly for scalar entry points.
"""

import math

_LOG_SQRT_PI = 0.5723649429247001  # log(sqrt(pi))
_INV_SQRT2 = 0.7071067811865476


def ks_asymptotic_sf(lam):
    """Two-sided asymptotic Kolmogorov-Smirnov survival probability Q(lam).

    Alternating series 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lam^2), truncated
    once a term drops below 1e-12 and clamped to [0, 1].  Below lam ~ 0.04 the
    terms shrink too slowly to truncate while Q equals 1 to double precision,
    so short-circuit there.
    """
    if lam < 0.04:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 1001):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    q = 2.0 * total
    if q < 0.0:
        return 0.0
    if q > 1.0:
        return 1.0
    return q


def gamma_q(a, x):
    """Regularized upper incomplete gamma function Q(a, x).

    Series expansion of P(a, x) for x < a + 1, Lentz continued fraction for
    Q(a, x) otherwise; absolute error well under 1e-10 over the chi-square
    range exercised here.
    """
    if a <= 0.0 or x < 0.0 or x != x:
        raise ValueError("gamma_q requires a > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        # series for P(a, x); Q = 1 - P
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(1000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        p = total * math.exp(-x + a * math.log(x) - math.lgamma(a))
        q = 1.0 - p
        if q < 0.0:
            return 0.0
        return q
    # continued fraction for Q(a, x), modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    if q > 1.0:
        return 1.0
    if q < 0.0:
        return 0.0
    return q


def exgauss_logpdf1(x, mu, sigma, tau):
    """Log density at x of Normal(mu, sigma^2) + Exponential(mean tau).

    Two algebraically equivalent formulations switched on the sign of the
    erfc argument u = (mu + sigma^2/tau - x) / (sqrt(2) sigma), so neither
    the exponential prefactor nor erfc can over/underflow:

      u <  0 (right tail): exp-erfc form, prefactor exponent is <= 0;
      u >= 0 (left/body):  Gauss-erfcx form, log(erfcx) evaluated via
                           erfc up to u = 25 and an asymptotic series above.
    """
    w = (x - mu) / sigma
    r = sigma / tau
    u = (r - w) * _INV_SQRT2
    if u < 0.0:
        return -math.log(2.0 * tau) + r * (0.5 * r - w) + math.log(math.erfc(u))
    if u < 25.0:
        log_erfcx = u * u + math.log(math.erfc(u))
    else:
        v = 1.0 / (u * u)
        series = v * (-0.5 + v * (0.75 + v * (-1.875 + v * 6.5625)))
        log_erfcx = -math.log(u) - _LOG_SQRT_PI + math.log1p(series)
    return -math.log(2.0 * tau) - 0.5 * w * w + log_erfcx
