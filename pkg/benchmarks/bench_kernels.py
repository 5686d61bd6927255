"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--events 200000] [--repeats 7]

Imports both kernel implementations directly (bypassing the CDRLAG_BACKEND
selector), warms the JIT, and reports the median wall time of each kernel.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cdrlag import _kernels_numba as knb
from cdrlag import _kernels_numpy as knp


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def _match_inputs(rng, n_events):
    n_pairs = max(n_events // 200, 1)
    n_cdr = int(n_events * 0.8)
    net_pair = np.sort(rng.integers(0, n_pairs, n_events))
    net_sub = net_pair // 10  # ~10 cells per subscriber
    net_ts = rng.integers(0, 5 * 86400, n_events)
    order = np.lexsort((net_ts, net_sub))
    net_sub, net_ts, net_pair = net_sub[order], net_ts[order], net_pair[order]
    cdr_pair = np.sort(rng.integers(0, n_pairs, n_cdr))
    cdr_sub = cdr_pair // 10
    cdr_ts = rng.integers(0, 5 * 86400, n_cdr)
    order = np.lexsort((cdr_ts, cdr_sub))
    cdr_sub, cdr_ts, cdr_pair = cdr_sub[order], cdr_ts[order], cdr_pair[order]
    return (
        net_sub.astype(np.int64),
        net_ts.astype(np.int64),
        net_pair.astype(np.int64),
        cdr_sub.astype(np.int64),
        cdr_ts.astype(np.int64),
        cdr_pair.astype(np.int64),
        n_pairs,
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--events", type=int, default=200_000, help="network event count")
    ap.add_argument("--repeats", type=int, default=7, help="timed repetitions per kernel")
    args = ap.parse_args()

    rng = np.random.default_rng(1234)
    match_args = _match_inputs(rng, args.events)
    ks_a = np.sort(rng.normal(0.0, 1.0, 50_000))
    ks_b = np.sort(rng.normal(0.2, 1.1, 60_000))
    exg = rng.normal(300.0, 100.0, 200_000) + rng.exponential(200.0, 200_000)

    cases = [
        ("backward_match", lambda k: k.backward_match(*match_args)),
        ("ks_statistic", lambda k: k.ks_statistic(ks_a, ks_b)),
        ("exgauss_nll", lambda k: k.exgauss_nll(exg, 300.0, 100.0, 200.0)),
        ("gamma_q x1000", lambda k: [k.gamma_q(3.5, 0.01 + 0.02 * i) for i in range(1000)]),
    ]

    # warm the JIT so compilation is not billed to the numba column
    for _, fn in cases:
        fn(knb)
        fn(knp)

    print(f"{'kernel':<18} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, fn in cases:
        t_nb = _median_time(lambda: fn(knb), args.repeats)
        t_np = _median_time(lambda: fn(knp), args.repeats)
        print(f"{name:<18} {t_nb * 1e3:>10.2f}ms {t_np * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
