"""Scalar building blocks: z(x) = 1/(1 - e^{-x}), its logarithmic derivatives,
Z/Z-dagger products over shift sets, and the finite-N sine kernel.

Every function accepts scalars or numpy arrays and broadcasts.  Arguments are
first reduced modulo 2*pi*i (z is periodic in the imaginary direction), so the
stabilised small-argument branches also apply near the poles at 2*pi*i*k.
"""

from __future__ import annotations

import cmath
import numbers
from typing import Iterable

import numpy as np

from .errors import PoleError

POLE_TOL = 1e-12
SERIES_RADIUS = 1e-4
TWO_PI = 2.0 * np.pi

__all__ = [
    "POLE_TOL",
    "z_eval",
    "logz_deriv",
    "logz_deriv2",
    "z_product",
    "sn_kernel",
]


def _reduce(x, pole_tol: float):
    """Return y = x - 2*pi*i*k with |Im y| <= pi, raising near a pole."""
    x = np.asarray(x, dtype=complex)
    k = np.round(x.imag / TWO_PI)
    y = x - 1j * TWO_PI * k
    if np.any(np.abs(y) < pole_tol):
        bad = x[np.abs(y) < pole_tol] if x.ndim else x
        raise PoleError(f"argument within {pole_tol:g} of a pole of z: {np.ravel(bad)[:3]}")
    return y


def _reduce_scalar(x: complex, pole_tol: float) -> complex:
    y = x - 1j * TWO_PI * round(x.imag / TWO_PI)
    if abs(y) < pole_tol:
        raise PoleError(f"argument within {pole_tol:g} of a pole of z: {x}")
    return y


def _z_scalar(x: complex, pole_tol: float) -> complex:
    y = _reduce_scalar(x, pole_tol)
    if abs(y) < SERIES_RADIUS:
        return 1.0 / y + 0.5 + y / 12.0 - y**3 / 720.0
    if y.real >= 0:
        return -1.0 / _expm1(-y)
    return cmath.exp(y) / _expm1(y)


def _expm1(y: complex) -> complex:
    if abs(y) < 0.5:
        return complex(np.expm1(y))
    return cmath.exp(y) - 1.0


def _dz_scalar(x: complex, pole_tol: float) -> complex:
    y = _reduce_scalar(x, pole_tol)
    if abs(y) < SERIES_RADIUS:
        y2 = y * y
        return 1.0 / y2 - 1.0 / 12.0 + y2 / 240.0 - y2 * y2 / 6048.0
    s = -y if y.real >= 0 else y
    if s.real < -700.0:
        return 0j
    return cmath.exp(s) / _expm1(s) ** 2


def _is_scalar(x) -> bool:
    return isinstance(x, numbers.Number) and not isinstance(x, np.ndarray)


def _unwrap(out, like):
    return out[()] if np.ndim(like) == 0 else out


def z_eval(x, pole_tol: float = POLE_TOL):
    """z(x) = 1 / (1 - exp(-x)).

    Uses ``expm1`` on the side where it is well conditioned and the Laurent
    series ``1/y + 1/2 + y/12 - y**3/720`` within ``SERIES_RADIUS`` of a pole.
    """
    if _is_scalar(x):
        return _z_scalar(complex(x), pole_tol)
    y = _reduce(x, pole_tol)
    out = np.empty_like(y)
    small = np.abs(y) < SERIES_RADIUS
    right = ~small & (y.real >= 0)
    left = ~small & (y.real < 0)
    with np.errstate(over="ignore", invalid="ignore"):
        out[right] = -1.0 / np.expm1(-y[right])
        e = np.exp(y[left])
        out[left] = e / np.expm1(y[left])
    ys = y[small]
    out[small] = 1.0 / ys + 0.5 + ys / 12.0 - ys**3 / 720.0
    return _unwrap(out, x)


def logz_deriv(x, pole_tol: float = POLE_TOL):
    """(z'/z)(x) = 1 - z(x)."""
    return 1.0 - z_eval(x, pole_tol)


def logz_deriv2(x, pole_tol: float = POLE_TOL):
    """(z'/z)'(x) = e^x / (e^x - 1)^2, i.e. 1 / (4 sinh^2(x/2))."""
    if _is_scalar(x):
        return _dz_scalar(complex(x), pole_tol)
    y = _reduce(x, pole_tol)
    out = np.empty_like(y)
    small = np.abs(y) < SERIES_RADIUS
    # e^{-|y|}/(1 - e^{-|y|})^2 written on whichever side keeps exp() bounded
    s = np.where(y.real >= 0, -y, y)
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(s) / np.expm1(s) ** 2
    out[~small] = val[~small]
    ys = y[small]
    y2 = ys * ys
    out[small] = 1.0 / y2 - 1.0 / 12.0 + y2 / 240.0 - y2 * y2 / 6048.0
    return _unwrap(out, x)


def z_product(A: Iterable, B: Iterable, dagger: bool = False, pole_tol: float = POLE_TOL):
    """Z(A, B) = prod_{a in A, b in B} z(a + b).

    With ``dagger`` the factors whose argument vanishes (to ``pole_tol``) are
    omitted; without it such a factor raises :class:`PoleError`.  Elements of
    A and B may themselves be arrays, in which case the product broadcasts.
    """
    out = 1.0 + 0j
    for a in A:
        for b in B:
            s = a + b
            if _is_scalar(s):
                if dagger and abs(s) < pole_tol:
                    continue
                out = out * _z_scalar(complex(s), pole_tol)
                continue
            s = np.asarray(s, dtype=complex)
            if dagger:
                zero = np.abs(s) < pole_tol
                if np.all(zero):
                    continue
                if np.any(zero):
                    safe = np.where(zero, 1.0, s)
                    out = out * np.where(zero, 1.0, z_eval(safe, pole_tol))
                    continue
            out = out * z_eval(s, pole_tol)
    return out


def sn_kernel(alpha, N: int):
    """S_N(alpha) = sin(N alpha / 2) / sin(alpha / 2), continuous at 2*pi*Z.

    The argument is reduced to eps = alpha - 2*pi*k; then
    S_N(alpha) = (-1)^{k(N-1)} S_N(eps), and S_N(0) = N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    a = np.asarray(alpha, dtype=float)
    k = np.round(a / TWO_PI)
    eps = a - TWO_PI * k
    sign = np.where((k * (N - 1)) % 2 == 0, 1.0, -1.0)
    small = np.abs(eps) < 1e-6
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.sin(N * eps / 2.0) / np.sin(eps / 2.0)
    series = N * (1.0 - (N * N - 1.0) * eps * eps / 24.0)
    out = sign * np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out
