"""Generate a plain-text table of zeta-zero ordinates for local testing.

Zeros are located as sign changes of the Riemann-Siegel Z function
(vectorised main sum plus three remainder terms, whose coefficient functions
are fitted once from high-precision derivatives), refined by bisection, and
spot-checked against ``mpmath.zetazero``.

    python scripts/make_zeros.py --count 100000 --out zeros_1e5.txt

Not part of the package: the library only reads zero tables.
"""

from __future__ import annotations

import argparse
import math
import sys

import mpmath
import numpy as np
from numpy.polynomial import Chebyshev

TWO_PI = 2.0 * math.pi
LOW = 200


def _remainder_coefficients(deg: int = 48):
    mpmath.mp.dps = 40

    def psi(p):
        return mpmath.cos(2 * mpmath.pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * mpmath.pi * p)

    # Chebyshev nodes never hit the removable points p = 1/4, 3/4 exactly
    k = np.arange(4 * deg)
    p = 0.5 - 0.5 * np.cos(np.pi * (k + 0.5) / k.size)
    pi2 = float(mpmath.pi) ** 2
    c0, c1, c2 = [], [], []
    for pk in p:
        d = [float(v) for v in mpmath.diffs(psi, mpmath.mpf(pk), 6)]
        c0.append(d[0])
        c1.append(-d[3] / (96 * pi2))
        c2.append(d[2] / (64 * pi2) + d[6] / (18432 * pi2 * pi2))
    return [Chebyshev.fit(p, np.array(c), deg, domain=[0, 1]) for c in (c0, c1, c2)]


_COEFFS = None


def theta(t):
    t = np.asarray(t, dtype=float)
    return 0.5 * t * np.log(t / TWO_PI) - 0.5 * t - math.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


def siegel_z(t):
    global _COEFFS
    if _COEFFS is None:
        _COEFFS = _remainder_coefficients()
    t = np.asarray(t, dtype=float)
    a = np.sqrt(t / TWO_PI)
    m = np.floor(a).astype(int)
    p = a - m
    th = theta(t)
    total = np.zeros_like(t)
    for n in range(1, int(m.max()) + 1):
        active = m >= n
        total += np.where(active, np.cos(th - t * math.log(n)) / math.sqrt(n), 0.0)
    c0, c1, c2 = (c(p) for c in _COEFFS)
    rem = (-1.0) ** (m - 1) * a**-0.5 * (c0 + c1 / a + c2 / a**2)
    return 2.0 * total + rem


def _z_chunked(t, chunk=200_000):
    return np.concatenate([siegel_z(t[i:i + chunk]) for i in range(0, t.size, chunk)])


def find_zeros(count: int, step: float = 0.02, iters: int = 45) -> np.ndarray:
    # N(T) ~ theta(T)/pi + 1; overshoot a little then truncate
    T = 20.0
    while theta(T) / math.pi + 1 < count + 20:
        T *= 1.05
    grid = np.arange(10.0, T, step)
    z = _z_chunked(grid)
    # close pairs can hide between two samples: resample around every local
    # minimum of |Z| that shows no sign change
    same = (np.sign(z[:-2]) == np.sign(z[1:-1])) & (np.sign(z[1:-1]) == np.sign(z[2:]))
    dip = same & (np.abs(z[1:-1]) < np.abs(z[:-2])) & (np.abs(z[1:-1]) < np.abs(z[2:]))
    centres = grid[1:-1][dip]
    sub = (centres[:, None] + np.linspace(-step, step, 65)[None, :]).ravel()
    order = np.argsort(np.concatenate([grid, sub]), kind="stable")
    grid = np.concatenate([grid, sub])[order]
    z = np.concatenate([z, _z_chunked(sub)])[order]
    idx = np.nonzero(np.sign(z[:-1]) != np.sign(z[1:]))[0]
    lo, hi = grid[idx], grid[idx + 1]
    zlo = z[idx]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        zm = _z_chunked(mid)
        left = np.sign(zm) == np.sign(zlo)
        lo = np.where(left, mid, lo)
        zlo = np.where(left, zm, zlo)
        hi = np.where(left, hi, mid)
    zeros = 0.5 * (lo + hi)
    if zeros.size < count:
        raise RuntimeError(f"found only {zeros.size} sign changes (grid too coarse?)")
    zeros = zeros[:count]
    # the asymptotic remainder is weakest at low height: take those from mpmath
    mpmath.mp.dps = 20
    for k in range(1, min(count, LOW) + 1):
        zeros[k - 1] = float(mpmath.zetazero(k).imag)
    return zeros


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--out", required=True)
    ap.add_argument("--check", type=int, default=20, help="indices checked against mpmath")
    args = ap.parse_args(argv)
    zeros = find_zeros(args.count)
    rng = np.random.default_rng(0)
    picks = sorted({1, args.count, *rng.integers(1, args.count + 1, args.check).tolist()})
    mpmath.mp.dps = 20
    worst = 0.0
    for k in picks:
        ref = float(mpmath.zetazero(k).imag)
        worst = max(worst, abs(ref - zeros[k - 1]))
    print(f"{zeros.size} zeros up to {zeros[-1]:.6f}; max deviation on {len(picks)} "
          f"checked indices: {worst:.2e}", file=sys.stderr)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(f"# {zeros.size} zeta zero ordinates (Riemann-Siegel, checked max dev {worst:.1e})\n")
        for g in zeros:
            fh.write(f"{g:.9f}\n")
    return 0 if worst < 1e-6 else 1


if __name__ == "__main__":
    raise SystemExit(main())
