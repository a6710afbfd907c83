"""Compare the compiled and pure-Python Bessel backends.

Usage::

    python3 benchmarks/bench_specfun.py [--points N] [--repeat R]

Each kernel is timed on the same random complex arguments with both
backends; the table reports the best of ``R`` runs and the speed-up. The
maximum relative difference between the backends is printed as a sanity
check.
"""

import argparse
import time

import numpy as np

from nanoplasmon import specfun

KERNELS = [
    ("K_0..3 sequence", specfun.bessel_k_seq_scaled_array, 3),
    ("I_0..3 sequence", specfun.bessel_i_seq_scaled_array, 3),
    ("J_0..3 sequence", specfun.bessel_j_seq_array, 3),
    ("K_0..20 sequence", specfun.bessel_k_seq_scaled_array, 20),
]


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    if "compiled" not in specfun.available_backends():
        print("compiled backend not built; only the Python backend is available")
        return 1
    rng = np.random.default_rng(args.seed)
    r = 10 ** rng.uniform(-2, np.log10(30), args.points)
    th = rng.uniform(-0.49 * np.pi, 0.49 * np.pi, args.points)
    z = r * np.exp(1j * th)

    print("%-18s %12s %12s %9s %10s" % ("kernel", "compiled s", "python s", "speedup", "max rel"))
    previous = specfun.active_backend()
    try:
        for label, fn, mmax in KERNELS:
            specfun.use_backend("compiled")
            tc, vc = best_time(lambda: fn(mmax, z), args.repeat)
            specfun.use_backend("python")
            tp, vp = best_time(lambda: fn(mmax, z), args.repeat)
            rel = np.max(np.abs(vc - vp) / np.maximum(np.abs(vp), 1e-300))
            print("%-18s %12.4f %12.4f %8.1fx %10.2e" % (label, tc, tp, tp / tc, rel))
    finally:
        specfun.use_backend(previous)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
