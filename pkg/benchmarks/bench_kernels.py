"""Compiled vs pure-numpy timings for the two hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Both implementations are called in the same process (the numpy versions are
what ``NCORR_DISABLE_NUMBA=1`` selects), results are checked to agree, and
the best-of-``repeat`` wall time is reported.  The first compiled call is
timed separately since it includes JIT compilation (or cache loading).
"""

import argparse
import time

import numpy as np

from ncorr import _kernels as K


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    L2, D2 = 200_000, 400
    H2 = [np.exp(-np.linspace(-4, 4, L2) ** 2) * np.exp(1j * rng.uniform(0, 6.3, L2))
          for _ in range(2)]
    L3, D3 = 3_000, 60
    H3 = [np.exp(1j * rng.uniform(0, 6.3, L3)) for _ in range(3)]

    x = np.sort(rng.uniform(0, 2000, 40_000))
    wx = rng.uniform(size=x.size)
    du = 1e-3
    u = np.arange(-30.0, 30.0 + du, du)
    table = np.sinc(u) ** 2
    return [
        ("lattice_correlate n=2 (L=2e5, D=400)",
         lambda: K._corr2(H2[0], H2[1], D2) if K.USING_NUMBA else None,
         lambda: K.lattice_correlate_numpy(H2, D2)),
        ("lattice_correlate n=3 (L=3e3, D=60)",
         lambda: K._corr3(H3[0], H3[1], H3[2], D3) if K.USING_NUMBA else None,
         lambda: K.lattice_correlate_numpy(H3, D3)),
        ("table_pair_sum (4e4 points, window 30)",
         lambda: K._table_pair_sum(x, wx, x, wx, table, u[0], du, 30.0) if K.USING_NUMBA else None,
         lambda: K.table_pair_sum_numpy(x, wx, x, wx, table, u[0], du, 30.0)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"active backend: {K.backend_name()}")
    if not K.USING_NUMBA:
        print("numba unavailable or disabled; only numpy timings are shown")
    print(f"{'kernel':<40s} {'first jit':>10s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, jit_fn, np_fn in cases(np.random.default_rng(args.seed)):
        t_np, ref = best_of(np_fn, args.repeat)
        if K.USING_NUMBA:
            t0 = time.perf_counter()
            jit_fn()
            first = time.perf_counter() - t0
            t_jit, val = best_of(jit_fn, args.repeat)
            diff = np.max(np.abs(np.asarray(val) - np.asarray(ref))) / max(np.max(np.abs(ref)), 1e-300)
            print(f"{name:<40s} {first:10.4f} {t_jit:10.4f} {t_np:10.4f} {t_np / t_jit:8.1f} {diff:13.2e}")
        else:
            print(f"{name:<40s} {'-':>10s} {'-':>10s} {t_np:10.4f} {'-':>8s} {'-':>13s}")


if __name__ == "__main__":
    main()
