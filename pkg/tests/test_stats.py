import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from cdrlag.errors import FitError
from cdrlag.ingest import Charging, Tech
from cdrlag.matching import ErrorRecord
from cdrlag.stats import (
    BIN_EDGES_HOURS,
    BIN_STATS_HEADER,
    MIN_FIT_SAMPLE,
    N_BINS,
    TIME_BINS,
    ExGaussianParams,
    GroupKey,
    assign_bin,
    assign_bins,
    compute_bin_stats,
    exgaussian_logpdf,
    exgaussian_loglik,
    exgaussian_pdf,
    fit_exgaussian,
    group_samples,
    moments_init,
    write_bin_stats_csv,
)


def rec(ts, err, charging=Charging.PREPAID, tech=Tech.G2, cell="C1", sub="S1"):
    return ErrorRecord(ts, err, cell, tech, charging, sub)


# ---------------------------------------------------------------- binning


def test_bin_layout():
    assert BIN_EDGES_HOURS == (0, 7, 9, 12, 14, 17, 19, 24)
    assert N_BINS == 7
    assert [(b.start_hour, b.end_hour) for b in TIME_BINS] == [
        (0, 7), (7, 9), (9, 12), (12, 14), (14, 17), (17, 19), (19, 24),
    ]


def test_boundaries_land_in_successor_bin():
    # right-open bins: an edge hour belongs to the bin it starts
    for hour, want in [(0, 0), (7, 1), (9, 2), (12, 3), (14, 4), (17, 5), (19, 6)]:
        assert assign_bin(hour * 3600, 0) == want
    assert assign_bin(7 * 3600 - 1, 0) == 0
    assert assign_bin(24 * 3600 - 1, 0) == 6
    assert assign_bin(24 * 3600, 0) == 0  # next midnight wraps


def test_offset_shifts_local_time():
    # 23:00 UTC at +2h is 01:00 local
    assert assign_bin(23 * 3600, 2 * 3600) == 0
    # 00:30 UTC at -1h wraps back to 23:30 local
    assert assign_bin(1800, -3600) == 6


def test_assign_bins_matches_scalar():
    rng = np.random.default_rng(23)
    ts = rng.integers(0, 10 * 86400, 2000)
    for off in (0, 3600, -43200, 50400):
        vec = assign_bins(ts, off)
        assert list(vec) == [assign_bin(int(t), off) for t in ts]


# ---------------------------------------------------------------- grouping


def test_group_samples_keys_and_order():
    records = [
        rec(8 * 3600, 5, Charging.POSTPAID, Tech.G4),
        rec(8 * 3600, 3, Charging.PREPAID, Tech.G2),
        rec(10 * 3600, 7, Charging.PREPAID, Tech.G2),
        rec(8 * 3600 + 60, 4, Charging.PREPAID, Tech.G2),
    ]
    groups = group_samples(records, 0)
    keys = list(groups)
    assert keys == [
        GroupKey(Charging.POSTPAID, Tech.G4, 1),
        GroupKey(Charging.PREPAID, Tech.G2, 1),
        GroupKey(Charging.PREPAID, Tech.G2, 2),
    ]
    np.testing.assert_array_equal(groups[keys[1]], [3.0, 4.0])


def test_compute_bin_stats_values():
    records = [rec(8 * 3600, 94), rec(8 * 3600 + 1, 100)]
    stats = compute_bin_stats(records, 0)
    assert len(stats) == 1
    s = stats[0]
    assert s.count == 2
    assert s.mean == pytest.approx(97.0)
    assert s.std == pytest.approx(math.sqrt(18.0))  # n-1 deviation of {94, 100}


def test_singleton_group_has_no_std():
    (s,) = compute_bin_stats([rec(100, 5)], 0)
    assert s.count == 1 and s.std is None


def test_write_bin_stats_csv(tmp_path):
    p = tmp_path / "bin_stats.csv"
    write_bin_stats_csv(compute_bin_stats([rec(8 * 3600, 94), rec(8 * 3600, 100)], 0), p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(BIN_STATS_HEADER)
    assert lines[1] == "Prepaid,2G,7,9,2,97.000000,4.242641"


# ---------------------------------------------------------------- density


def test_params_validation():
    with pytest.raises(ValueError):
        ExGaussianParams(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ExGaussianParams(0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        ExGaussianParams(float("nan"), 1.0, 1.0)
    p = ExGaussianParams(3.0, 2.0, 4.0)
    assert p.mean == pytest.approx(7.0)
    assert p.variance == pytest.approx(20.0)


def convolution_pdf(x, p):
    """Independent oracle: numerically integrate the defining convolution
    Normal(mu, sigma) * Exponential(tau)."""
    def integrand(u):
        return (
            math.exp(-u / p.tau)
            / p.tau
            * math.exp(-0.5 * ((x - u - p.mu) / p.sigma) ** 2)
            / (p.sigma * math.sqrt(2.0 * math.pi))
        )

    # epsabs is absolute and the tail values sit near 1e-7, so switch the
    # quadrature to a pure relative target
    val, err = scipy.integrate.quad(integrand, 0.0, np.inf, limit=400, epsabs=0.0, epsrel=1e-12)
    assert err < abs(val) * 1e-9 + 1e-300
    return val


@pytest.mark.parametrize(
    "params", [ExGaussianParams(0.0, 1.0, 1.0), ExGaussianParams(300.0, 100.0, 200.0)]
)
def test_pdf_matches_convolution_quadrature(params):
    lo = params.mu - 4 * params.sigma
    hi = params.mean + 6 * params.tau
    for x in np.linspace(lo, hi, 9):
        assert exgaussian_pdf(float(x), params) == pytest.approx(
            convolution_pdf(float(x), params), rel=1e-8, abs=1e-14
        )


def test_pdf_integrates_to_one():
    p = ExGaussianParams(10.0, 2.0, 5.0)
    total, _ = scipy.integrate.quad(lambda x: exgaussian_pdf(x, p), -40.0, 150.0, limit=300)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_gaussian_limit():
    # tau -> 0 degenerates to a pure normal
    p = ExGaussianParams(0.0, 1.0, 1e-6)
    assert exgaussian_pdf(0.0, p) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-3)


def test_logpdf_shapes():
    p = ExGaussianParams(0.0, 1.0, 1.0)
    assert isinstance(exgaussian_logpdf(0.5, p), float)
    out = exgaussian_logpdf(np.zeros((2, 3)), p)
    assert out.shape == (2, 3)


def test_loglik_is_sum_of_logpdf():
    rng = np.random.default_rng(2)
    x = rng.normal(5.0, 2.0, 100) + rng.exponential(3.0, 100)
    p = ExGaussianParams(5.0, 2.0, 3.0)
    assert exgaussian_loglik(x, p) == pytest.approx(float(exgaussian_logpdf(x, p).sum()))


# ---------------------------------------------------------------- fitting


def test_moments_init_recovers_rough_shape():
    rng = np.random.default_rng(31)
    x = rng.normal(100.0, 10.0, 50_000) + rng.exponential(30.0, 50_000)
    p = moments_init(x)
    assert p.mu == pytest.approx(100.0, rel=0.05)
    assert p.sigma == pytest.approx(10.0, rel=0.25)
    assert p.tau == pytest.approx(30.0, rel=0.1)


def test_moments_init_clamps_on_left_skewed_sample():
    rng = np.random.default_rng(37)
    x = -rng.exponential(5.0, 10_000)  # negative skew: raw tau would be < 0
    p = moments_init(x)
    s = float(np.std(x, ddof=1))
    assert p.tau == pytest.approx(0.01 * s)
    assert p.sigma > 0.0


def test_fit_improves_on_initializer():
    rng = np.random.default_rng(41)
    x = rng.normal(50.0, 5.0, 2_000) + rng.exponential(20.0, 2_000)
    init = moments_init(x)
    fitted = fit_exgaussian(x)
    assert exgaussian_loglik(x, fitted) >= exgaussian_loglik(x, init)


def test_fit_recovery_moderate_sample():
    rng = np.random.default_rng(43)
    x = rng.normal(20.0, 4.0, 5_000) + rng.exponential(8.0, 5_000)
    p = fit_exgaussian(x)
    assert p.mu == pytest.approx(20.0, rel=0.05)
    assert p.sigma == pytest.approx(4.0, rel=0.08)
    assert p.tau == pytest.approx(8.0, rel=0.08)


def test_fit_rejects_small_sample():
    with pytest.raises(FitError):
        fit_exgaussian(np.arange(MIN_FIT_SAMPLE - 1, dtype=np.float64))


def test_fit_rejects_zero_variance():
    with pytest.raises(FitError):
        fit_exgaussian(np.full(200, 7.0))
