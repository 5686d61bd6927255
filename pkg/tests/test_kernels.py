"""Backend parity and third-party cross-checks for the hot kernels.

Both kernel implementations must agree bitwise on the integer paths
(matching) and to float equality on the analytic ones, and each analytic
kernel is checked against an independent scipy implementation.
"""

import numpy as np
import pytest
import scipy.special
import scipy.stats

from cdrlag import _kernels_numba, _kernels_numpy, kernels

BACKENDS = (_kernels_numba, _kernels_numpy)


def _random_streams(rng, n_net, n_cdr, n_subs=7, n_cells=5):
    """Sorted (sub, ts, pair) code arrays for both streams, as the matcher
    expects them."""
    def one(n):
        sub = rng.integers(0, n_subs, n)
        cell = rng.integers(0, n_cells, n)
        ts = rng.integers(0, 5000, n)
        order = np.lexsort((ts, sub))
        return sub[order].astype(np.int64), ts[order].astype(np.int64), cell[order]

    ns, nt, nc = one(n_net)
    cs, ct, cc = one(n_cdr)
    n_pairs = n_subs * n_cells
    return ns, nt, ns * n_cells + nc, cs, ct, cs * n_cells + cc, n_pairs


def test_backward_match_backends_agree():
    rng = np.random.default_rng(7)
    for _ in range(50):
        args = _random_streams(rng, int(rng.integers(0, 300)) + 1, int(rng.integers(0, 300)) + 1)
        m1, e1 = _kernels_numba.backward_match(*args)
        m2, e2 = _kernels_numpy.backward_match(*args)
        np.testing.assert_array_equal(m1, m2)
        np.testing.assert_array_equal(e1[m1], e2[m2])


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_ks_statistic_matches_scipy(impl):
    rng = np.random.default_rng(11)
    for _ in range(40):
        na = int(rng.integers(2, 80))
        nb = int(rng.integers(2, 80))
        # integer draws force heavy ties, the case naive D sweeps get wrong
        a = np.sort(rng.integers(0, 15, na).astype(np.float64))
        b = np.sort(rng.integers(0, 15, nb).astype(np.float64))
        d = impl.ks_statistic(a, b)
        ref = scipy.stats.ks_2samp(a, b, method="asymp").statistic
        assert d == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_ks_sf_matches_scipy(impl):
    for lam in (0.05, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0):
        assert impl.ks_asymptotic_sf(lam) == pytest.approx(
            scipy.special.kolmogorov(lam), abs=1e-12
        )
    assert impl.ks_asymptotic_sf(0.02) == 1.0  # tiny lambda: series unstable, exact 1


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_gamma_q_matches_scipy(impl):
    rng = np.random.default_rng(3)
    a = rng.uniform(0.5, 30.0, 200)
    x = rng.uniform(0.0, 60.0, 200)
    ours = np.array([impl.gamma_q(ai, xi) for ai, xi in zip(a, x)])
    ref = scipy.special.gammaincc(a, x)
    np.testing.assert_allclose(ours, ref, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND)
def test_exgauss_logpdf_matches_scipy(impl):
    rng = np.random.default_rng(5)
    x = rng.uniform(-50.0, 400.0, 500)
    for mu, sigma, tau in [(0.0, 1.0, 1.0), (100.0, 20.0, 60.0), (10.0, 0.5, 1.5)]:
        ours = impl.exgauss_logpdf(x, mu, sigma, tau)
        ref = scipy.stats.exponnorm.logpdf(x, tau / sigma, loc=mu, scale=sigma)
        np.testing.assert_allclose(ours, ref, rtol=1e-9, atol=1e-9)


def test_exgauss_logpdf_extreme_tail_is_finite():
    # sigma/tau >> 1 drives the naive erfc formula to log(0); the asymptotic
    # branch has to keep these finite and accurate
    x = np.array([-2000.0, -500.0, 0.0, 500.0, 2000.0])
    for impl in BACKENDS:
        out = impl.exgauss_logpdf(x, 0.0, 100.0, 0.01)
        assert np.all(np.isfinite(out))
        ref = scipy.stats.exponnorm.logpdf(x, 0.01 / 100.0, loc=0.0, scale=100.0)
        np.testing.assert_allclose(out, ref, rtol=1e-6)


def test_exgauss_nll_is_negated_sum():
    rng = np.random.default_rng(9)
    x = rng.uniform(0.0, 50.0, 300)
    for impl in BACKENDS:
        nll = impl.exgauss_nll(x, 20.0, 5.0, 10.0)
        assert nll == pytest.approx(-impl.exgauss_logpdf(x, 20.0, 5.0, 10.0).sum(), rel=1e-12)


def test_analytic_kernels_agree_across_backends():
    """Seriation row means can sit close together and are built from the KS d
    and its tail probability, so those two must agree bit-for-bit across
    backends.  gamma_q only feeds the combined p-value, and numba's libm can
    differ from CPython's in the last couple of ULPs, so it gets a tight
    relative tolerance instead."""
    rng = np.random.default_rng(13)
    a = np.sort(rng.integers(0, 40, 500).astype(np.float64))
    b = np.sort(rng.integers(0, 40, 700).astype(np.float64))
    assert _kernels_numba.ks_statistic(a, b) == _kernels_numpy.ks_statistic(a, b)
    for lam in rng.uniform(0.05, 3.0, 50):
        assert _kernels_numba.ks_asymptotic_sf(lam) == _kernels_numpy.ks_asymptotic_sf(lam)
    for a_, x_ in zip(rng.uniform(0.5, 20, 50), rng.uniform(0, 40, 50)):
        assert _kernels_numba.gamma_q(a_, x_) == pytest.approx(
            _kernels_numpy.gamma_q(a_, x_), rel=1e-12
        )


def test_selected_backend_exports():
    assert kernels.BACKEND in ("numba", "numpy")
    for name in kernels.__all__:
        assert getattr(kernels, name) is not None
