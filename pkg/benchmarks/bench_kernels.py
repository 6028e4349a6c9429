"""Time the compiled and pure-numpy oracle kernels against each other.

    python3 benchmarks/bench_kernels.py [--n 4000] [--times 501] [--repeat 3]

The compiled path is warmed up once before timing, so the figures exclude
numba's compilation cost.
"""
import argparse
import time

import numpy as np

from decaycut import BandModel, SystemParams, discretize
from decaycut._jit import NUMBA_ENABLED
from decaycut.kernels import secular_solve, spectral_sum


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--times", type=int, default=501)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    sys_ = discretize(BandModel.constant(0.2), SystemParams(-0.4), args.n)
    d, v2 = sys_.node_energies, sys_.couplings ** 2
    ts = np.linspace(0.0, 50.0, args.times)

    if not NUMBA_ENABLED:
        print("numba unavailable or disabled; timing the numpy path only")
    rows = []
    for label, jit in (("numba", True), ("numpy", False)):
        if jit and not NUMBA_ENABLED:
            continue
        if jit:  # compile
            secular_solve(sys_.epsilon, d[:8], v2[:8], use_jit=True)
            spectral_sum(np.zeros(2), np.ones(2), ts[:2], use_jit=True)
        t_sec, (lam, w) = best_of(lambda: secular_solve(sys_.epsilon, d, v2, use_jit=jit), args.repeat)
        t_sum, g = best_of(lambda: spectral_sum(lam, w, ts, use_jit=jit), args.repeat)
        rows.append((label, t_sec, t_sum, lam, g))

    print(f"n = {args.n}, {args.times} times, best of {args.repeat}")
    print(f"{'path':<6} {'secular [s]':>12} {'spectral [s]':>13}")
    for label, t_sec, t_sum, _, _ in rows:
        print(f"{label:<6} {t_sec:12.4f} {t_sum:13.4f}")
    if len(rows) == 2:
        (_, a1, b1, lam1, g1), (_, a2, b2, lam2, g2) = rows
        print(f"speedup: secular x{a2 / a1:.1f}, spectral x{b2 / b1:.1f}")
        print(f"max |dlam| = {np.abs(lam1 - lam2).max():.2e}, max |dg| = {np.abs(g1 - g2).max():.2e}")


if __name__ == "__main__":
    main()
