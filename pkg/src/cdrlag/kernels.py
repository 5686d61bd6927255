"""Hot-kernel backend selection.

The pipeline's inner loops (backward matching, KS sweeps, exGaussian
log-likelihood, incomplete gamma) exist in two implementations:

* ``cdrlag._kernels_numba`` — scalar/loop code compiled with ``@njit``;
* ``cdrlag._kernels_numpy`` — vectorized pure-numpy equivalents.

The ``CDRLAG_BACKEND`` environment variable picks one at import time:
``numba`` (require numba, the default fast path), ``numpy`` (force the
fallback), or ``auto`` (numba if importable, else numpy).  The backends
agree bit-for-bit on the matcher and the KS statistic/tail (the inputs to
the seriation ordering) and to a couple of ULPs elsewhere; see
tests/test_kernels.py and benchmarks/bench_kernels.py.
"""

import os

_choice = os.environ.get("CDRLAG_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ImportError(f"CDRLAG_BACKEND must be auto, numba or numpy, got {_choice!r}")

if _choice == "numpy":
    from . import _kernels_numpy as _impl
else:
    try:
        from . import _kernels_numba as _impl
    except ImportError:
        if _choice == "numba":
            raise
        from . import _kernels_numpy as _impl

BACKEND = _impl.BACKEND
backward_match = _impl.backward_match
ks_statistic = _impl.ks_statistic
ks_asymptotic_sf = _impl.ks_asymptotic_sf
gamma_q = _impl.gamma_q
exgauss_logpdf = _impl.exgauss_logpdf
exgauss_nll = _impl.exgauss_nll

__all__ = [
    "BACKEND",
    "backward_match",
    "exgauss_logpdf",
    "exgauss_nll",
    "gamma_q",
    "ks_asymptotic_sf",
    "ks_statistic",
]
