#!/usr/bin/env python3
"""Timing comparison of the numba kernels against the numpy fallbacks.

The two sequential hot loops are the transistor-envelope state machine and
the RK4 excitation scan; everything else in the package is FFT-bound numpy.
Run:  python benchmarks/bench_kernels.py [n_samples]
"""

import sys
import time

import numpy as np

from pulsechain import _accel


def bench(label, fn, args, repeats=5):
    fn(*args)  # warm-up (JIT compile for the numba variant)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    best = min(times)
    print(f"  {label:<18s} {best * 1e3:9.3f} ms")
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    dt = 0.1e-9
    print(f"n_samples = {n}")

    print("envelope state loop:")
    i_on = np.linspace(0.02 * n, 0.9 * n, 8).astype(np.int64)
    i_off = (i_on + 0.05 * n).astype(np.int64)
    args = (n, dt, i_on, i_off, 9.6e5, 0.026, 1e-14, 0.040, 2.0, 50.0, 200e-9)
    t_np = bench("numpy fallback", _accel.envelope_loop_numpy, args)
    if _accel.HAVE_NUMBA:
        t_nb = bench("numba kernel", _accel.envelope_loop_numba, args)
        print(f"  speedup            {t_np / t_nb:9.1f} x")

    print("excitation RK4 scan:")
    rng = np.random.default_rng(0)
    xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    args = (xi, dt, complex(-1.9e7, 0.0), 6178.0)
    t_np = bench("numpy fallback", _accel.excite_scan_numpy, args)
    if _accel.HAVE_NUMBA:
        t_nb = bench("numba kernel", _accel.excite_scan_numba, args)
        print(f"  speedup            {t_np / t_nb:9.1f} x")

    if not _accel.HAVE_NUMBA:
        print("numba not installed: only the fallback path was timed")


if __name__ == "__main__":
    main()
