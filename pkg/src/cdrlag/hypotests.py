"""Two-sample Kolmogorov-Smirnov test and Fisher p-value combination."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

P_FLOOR = 1e-300  # ln of smaller underflows the chi-square domain


@dataclass(frozen=True, slots=True)
class KsResult:
    d_statistic: float
    p_value: float
    n_a: int
    n_b: int


@dataclass(frozen=True, slots=True)
class FisherResult:
    chi2: float
    dof: int
    combined_p: float
    index: float  # chi2 / dof; lower = larger p-values = more similar samples


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS test with the asymptotic tail probability.

    Uses the small-sample effective-size correction
    lam = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * d with ne = na*nb/(na+nb).
    """
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    if xa.size == 0 or xb.size == 0:
        raise ValueError("ks_two_sample requires non-empty samples")
    d = kernels.ks_statistic(xa, xb)
    ne = xa.size * xb.size / (xa.size + xb.size)
    sqrt_ne = math.sqrt(ne)
    lam = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d
    p = kernels.ks_asymptotic_sf(lam)
    return KsResult(d_statistic=float(d), p_value=float(p), n_a=int(xa.size), n_b=int(xb.size))


def chi_square_sf(x: float, dof: int) -> float:
    """P(X > x) for a chi-square variable with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError(f"dof must be positive, got {dof}")
    if x < 0.0:
        return 1.0
    return kernels.gamma_q(dof / 2.0, x / 2.0)


def fisher_combine(pvalues: Sequence[float]) -> FisherResult:
    """Combine independent p-values with Fisher's method.

    chi2 = -2 * sum(ln p_i) on 2k degrees of freedom; p-values are floored
    at 1e-300 before the log.  ``index`` rescales chi2 by its null mean so
    it is comparable across pairs with different bin coverage.
    """
    ps = [float(p) for p in pvalues]
    if not ps:
        raise ValueError("fisher_combine requires at least one p-value")
    for p in ps:
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"p-value out of range: {p}")
    chi2 = -2.0 * sum(math.log(max(p, P_FLOOR)) for p in ps)
    dof = 2 * len(ps)
    return FisherResult(chi2=chi2, dof=dof, combined_p=chi_square_sf(chi2, dof), index=chi2 / dof)
