"""Time-of-day binning, per-group summaries, exGaussian density and fit."""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import FitError
from .ingest import Charging, Tech

SECONDS_PER_DAY = 86400

# right-open daily bins, in hours
BIN_EDGES_HOURS = (0, 7, 9, 12, 14, 17, 19, 24)
_UPPER_EDGES = BIN_EDGES_HOURS[1:-1]  # thresholds for bisect
_UPPER_EDGES_ARR = np.array(_UPPER_EDGES)

BIN_STATS_HEADER = ("charging", "tech", "bin_start", "bin_end", "count", "mean", "std")

MIN_FIT_SAMPLE = 50


@dataclass(frozen=True, slots=True)
class TimeBin:
    index: int
    start_hour: int
    end_hour: int


TIME_BINS = tuple(
    TimeBin(i, BIN_EDGES_HOURS[i], BIN_EDGES_HOURS[i + 1]) for i in range(len(BIN_EDGES_HOURS) - 1)
)
N_BINS = len(TIME_BINS)


@dataclass(frozen=True, slots=True)
class GroupKey:
    charging: Charging
    tech: Tech
    bin: int


@dataclass(frozen=True, slots=True)
class BinStats:
    key: GroupKey
    count: int
    mean: float
    std: float | None  # sample std (n-1); None when count < 2


@dataclass(frozen=True, slots=True)
class ExGaussianParams:
    """Normal(mu, sigma^2) + Exponential(mean tau); mean mu+tau, variance sigma^2+tau^2."""

    mu: float
    sigma: float
    tau: float

    def __post_init__(self):
        ok = (
            math.isfinite(self.mu)
            and math.isfinite(self.sigma)
            and math.isfinite(self.tau)
            and self.sigma > 0.0
            and self.tau > 0.0
        )
        if not ok:
            raise ValueError(
                f"invalid exGaussian parameters mu={self.mu} sigma={self.sigma} tau={self.tau}"
            )

    @property
    def mean(self) -> float:
        return self.mu + self.tau

    @property
    def variance(self) -> float:
        return self.sigma**2 + self.tau**2


def assign_bin(timestamp: int, utc_offset_seconds: int) -> int:
    """Index of the daily bin containing the local time of day of ``timestamp``."""
    hour = ((timestamp + utc_offset_seconds) % SECONDS_PER_DAY) // 3600
    return bisect_right(_UPPER_EDGES, hour)


def assign_bins(timestamps, utc_offset_seconds: int) -> np.ndarray:
    """Vectorized :func:`assign_bin`."""
    ts = np.asarray(timestamps, dtype=np.int64)
    hours = ((ts + utc_offset_seconds) % SECONDS_PER_DAY) // 3600
    return np.searchsorted(_UPPER_EDGES_ARR, hours, side="right")


def group_samples(records, utc_offset_seconds: int) -> dict[GroupKey, np.ndarray]:
    """Error samples keyed by (charging, tech, bin), in deterministic key order.

    Only groups that actually occur appear; within a group the sample keeps
    the input record order.
    """
    raw: dict[tuple[Charging, Tech, int], list[int]] = {}
    for r in records:
        b = assign_bin(r.cdr_timestamp, utc_offset_seconds)
        raw.setdefault((r.charging, r.tech, b), []).append(r.error_seconds)
    out: dict[GroupKey, np.ndarray] = {}
    for (charging, tech, b) in sorted(raw, key=lambda k: (k[0].value, k[1].value, k[2])):
        out[GroupKey(charging, tech, b)] = np.asarray(raw[(charging, tech, b)], dtype=np.float64)
    return out


def compute_bin_stats(records, utc_offset_seconds: int) -> list[BinStats]:
    """Per-(charging, tech, bin) count/mean/std of error seconds.

    Groups with no records are omitted; std is the n-1 sample deviation and
    absent for singleton groups.  Output is sorted by charging, tech, bin.
    """
    out = []
    for key, vals in group_samples(records, utc_offset_seconds).items():
        std = float(np.std(vals, ddof=1)) if vals.size >= 2 else None
        out.append(BinStats(key=key, count=int(vals.size), mean=float(np.mean(vals)), std=std))
    return out


def write_bin_stats_csv(stats: Iterable[BinStats], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BIN_STATS_HEADER)
        for s in stats:
            tb = TIME_BINS[s.key.bin]
            writer.writerow(
                [
                    s.key.charging.value,
                    s.key.tech.value,
                    tb.start_hour,
                    tb.end_hour,
                    s.count,
                    format(s.mean, ".6f"),
                    format(s.std, ".6f") if s.std is not None else "",
                ]
            )


def exgaussian_logpdf(x, params: ExGaussianParams):
    arr = np.asarray(x, dtype=np.float64)
    out = kernels.exgauss_logpdf(np.atleast_1d(arr).ravel(), params.mu, params.sigma, params.tau)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def exgaussian_pdf(x, params: ExGaussianParams):
    """Density of the exponentially modified normal law at ``x``."""
    out = np.exp(exgaussian_logpdf(x, params))
    return float(out) if np.isscalar(out) or np.ndim(out) == 0 else out


def exgaussian_loglik(sample, params: ExGaussianParams) -> float:
    """Total log-likelihood of ``sample`` under ``params``."""
    arr = np.ascontiguousarray(sample, dtype=np.float64)
    return -kernels.exgauss_nll(arr, params.mu, params.sigma, params.tau)


def moments_init(sample) -> ExGaussianParams:
    """Method-of-moments initializer for the exGaussian fit.

    tau from the skewness, clamped to [0.01 s, 2 s] so near-symmetric or
    left-skewed samples still land inside the valid parameter domain.
    """
    x = np.asarray(sample, dtype=np.float64)
    m = float(np.mean(x))
    s = float(np.std(x, ddof=1))
    if not (s > 0.0) or not math.isfinite(s):
        raise FitError("sample has zero variance")
    centered = x - m
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    skew = m3 / m2**1.5
    tau0 = s * float(np.cbrt(skew / 2.0))
    tau0 = min(max(tau0, 0.01 * s), 2.0 * s)
    mu0 = m - tau0
    sigma0 = math.sqrt(max(s**2 - tau0**2, (0.1 * s) ** 2))
    return ExGaussianParams(mu0, sigma0, tau0)


def _nelder_mead(f, x0, ftol=1e-8, max_iter=2000):
    """Minimize ``f`` with the standard Nelder-Mead simplex.

    Stops when the simplex's function-value spread falls below ``ftol`` (the
    point at which a further full iteration cannot improve the objective by
    that much) or after ``max_iter`` iterations.  Returns (x_best, f_best).
    """
    n = len(x0)
    sim = np.tile(np.asarray(x0, dtype=np.float64), (n + 1, 1))
    for i in range(n):
        if sim[i + 1, i] != 0.0:
            sim[i + 1, i] *= 1.05
        else:
            sim[i + 1, i] = 0.00025
    fs = np.array([f(v) for v in sim])
    for _ in range(max_iter):
        order = np.argsort(fs, kind="stable")
        sim = sim[order]
        fs = fs[order]
        if fs[-1] - fs[0] < ftol:
            break
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + (centroid - sim[-1])
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + 2.0 * (centroid - sim[-1])
            fe = f(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = centroid + 0.5 * (xr - centroid)  # outside contraction
                fc = f(xc)
                if fc <= fr:
                    sim[-1], fs[-1] = xc, fc
                else:
                    sim[1:] = sim[0] + 0.5 * (sim[1:] - sim[0])
                    fs[1:] = [f(v) for v in sim[1:]]
            else:
                xc = centroid - 0.5 * (centroid - sim[-1])  # inside contraction
                fc = f(xc)
                if fc < fs[-1]:
                    sim[-1], fs[-1] = xc, fc
                else:
                    sim[1:] = sim[0] + 0.5 * (sim[1:] - sim[0])
                    fs[1:] = [f(v) for v in sim[1:]]
    best = int(np.argmin(fs))
    return sim[best], fs[best]


def fit_exgaussian(sample) -> ExGaussianParams:
    """Maximum-likelihood exGaussian parameters for a raw error sample.

    Seeds from :func:`moments_init` and maximizes the total log-likelihood
    with a Nelder-Mead search over (mu, log sigma, log tau), so scale
    parameters stay positive without constraints.  The result's likelihood
    never falls below the initializer's.
    """
    x = np.ascontiguousarray(sample, dtype=np.float64)
    if x.size < MIN_FIT_SAMPLE:
        raise FitError(f"sample too small for fit: {x.size} < {MIN_FIT_SAMPLE}")
    init = moments_init(x)  # raises FitError on zero variance

    def nll(theta):
        return kernels.exgauss_nll(x, theta[0], math.exp(theta[1]), math.exp(theta[2]))

    theta0 = np.array([init.mu, math.log(init.sigma), math.log(init.tau)])
    theta, fbest = _nelder_mead(nll, theta0)
    if not math.isfinite(fbest):
        raise FitError("log-likelihood not finite at optimum")
    return ExGaussianParams(float(theta[0]), math.exp(theta[1]), math.exp(theta[2]))
