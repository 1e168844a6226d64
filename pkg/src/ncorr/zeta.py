"""Zeta-zero datasets and their correlation statistics.

Ordinates are read from plain text (one per line, ``#`` comments allowed).
Two statistics are provided:

* :func:`montgomery_statistic` -- ordered-pair sum of a band-limited profile
  of rescaled ordinate differences (diagonal included), against the sine-kernel
  prediction ``f(0) + int f(u) (1 - (sin pi u / pi u)^2) du``;
* :func:`zeta_n_correlation` -- the smoothly weighted n-tuple sum, against the
  pair-system main term with ``log T`` in place of the matrix size.

Rescaling ("normalisation"):

``"unfolded"``
    ordinates are mapped through the smooth zero-counting function
    ``theta(t)/pi + 1`` so the mean spacing is exactly 1 at every height;
    predictions use the matching weight-averaged logarithm.
``"asymptotic"``
    ordinates are multiplied by ``log T / 2 pi`` with a single height T.
    The slowly varying density makes this biased by O(1/log T).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConfigError, OrderError, ParseError, SizeError, SupportError
from .test_functions import PhiSpec, WeightSpec, _leggauss, h_eval, hyperplane_transform, kappa, psi

__all__ = [
    "ZeroDataset",
    "load_zeros",
    "unfold",
    "FejerProfile",
    "PairProfile",
    "montgomery_prediction",
    "MontgomeryResult",
    "montgomery_statistic",
    "ZetaCorrelation",
    "zeta_n_correlation",
    "effective_logscale",
]

TWO_PI = 2.0 * np.pi
DUPLICATE_TOL = 1e-10


# ---------------------------------------------------------------------------
# data

@dataclass(frozen=True)
class ZeroDataset:
    """Strictly increasing positive ordinates gamma of zeros 1/2 + i gamma."""

    ordinates: np.ndarray
    source: str | None = None

    def __post_init__(self):
        g = np.asarray(self.ordinates, dtype=float)
        if g.ndim != 1 or g.size < 2:
            raise ParseError("a zero dataset needs at least two ordinates")
        if np.any(g <= 0):
            raise ParseError("ordinates must be positive")
        if np.any(np.diff(g) <= 0):
            raise OrderError("ordinates must be strictly increasing")
        object.__setattr__(self, "ordinates", g)

    @property
    def count(self) -> int:
        return self.ordinates.size

    @property
    def max_height(self) -> float:
        return float(self.ordinates[-1])

    def up_to(self, T_cut: float | None) -> np.ndarray:
        g = self.ordinates
        if T_cut is None:
            return g
        if T_cut > self.max_height * (1 + 1e-12):
            raise ConfigError(f"T_cut={T_cut:g} exceeds the dataset height {self.max_height:g}")
        return g[g <= T_cut]


def load_zeros(path: str | os.PathLike) -> ZeroDataset:
    """Parse an ordinate file; the result is sorted."""
    values, lines = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                (token,) = text.split()
                val = float(token)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: expected one ordinate, got {text!r}") from None
            if not math.isfinite(val) or val <= 0:
                raise ParseError(f"{path}:{lineno}: ordinate must be positive and finite")
            values.append(val)
            lines.append(lineno)
    if not values:
        raise ParseError(f"{path}: no ordinates found")
    vals = np.array(values)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    dup = np.nonzero(np.diff(vals) <= DUPLICATE_TOL)[0]
    if dup.size:
        a, b = lines[order[dup[0]]], lines[order[dup[0] + 1]]
        raise OrderError(f"{path}: duplicate ordinate {vals[dup[0]]!r} on lines {a} and {b}")
    return ZeroDataset(vals, str(path))


def _theta(t: np.ndarray) -> np.ndarray:
    return 0.5 * t * np.log(t / TWO_PI) - 0.5 * t - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


def unfold(gamma) -> np.ndarray:
    """Smooth zero count theta(t)/pi + 1 (sign-preserving for mirrored data)."""
    g = np.asarray(gamma, dtype=float)
    a = np.abs(g)
    return np.sign(g) * (_theta(a) / np.pi + 1.0)


def _coordinates(gamma: np.ndarray, normalisation: str, T: float) -> np.ndarray:
    if normalisation == "unfolded":
        return unfold(gamma)
    if normalisation == "asymptotic":
        return gamma * math.log(T) / TWO_PI
    raise ConfigError("normalisation must be 'unfolded' or 'asymptotic'")


# ---------------------------------------------------------------------------
# profiles

@dataclass(frozen=True)
class FejerProfile:
    """f(u) = (sin(pi a u) / (pi a u))^2, whose Fourier transform is the
    triangle (1 - |alpha|/a)_+ / a supported on [-a, a]."""

    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigError("profile width must be positive")

    @property
    def support(self) -> float:
        return self.width

    def __call__(self, u):
        return np.sinc(self.width * np.asarray(u, dtype=float)) ** 2

    def fourier(self, alpha):
        a = self.width
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(alpha, dtype=float)) / a) / a

    def tail_mass(self, U: float) -> float:
        """Bound on int_{|u|>U} f."""
        return 2.0 / (np.pi**2 * self.width**2 * U)


@dataclass(frozen=True)
class PairProfile:
    """The two-variable f(x, y) of a PhiSpec as a function of x - y,
    tabulated on a fine grid and interpolated by a cubic spline."""

    phi: PhiSpec
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.phi.n != 2:
            raise ConfigError("PairProfile needs a 2-variable Phi")
        from scipy.interpolate import CubicSpline

        U = self.window
        du = 0.002 / self.phi.s
        u = np.arange(0.0, U + 4 * du, du)
        vals = np.real(hyperplane_transform(self.phi, [-2j * np.pi * u]))
        us = np.concatenate([-u[:0:-1], u])
        vs = np.concatenate([vals[:0:-1], vals])
        self._cache["spline"] = CubicSpline(us, vs)

    @property
    def support(self) -> float:
        return self.phi.s

    @property
    def window(self) -> float:
        return 450.0 / (TWO_PI * self.phi.s)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.where(np.abs(u) <= self.window, self._cache["spline"](u), 0.0)
        return out[()] if out.ndim == 0 else out

    def fourier(self, alpha):
        """Phi restricted to the line (alpha, -alpha)."""
        return self.phi.c * psi(np.asarray(alpha, dtype=float) / self.phi.s) ** 2

    def tail_mass(self, U: float) -> float:
        return 0.0 if U >= self.window else float("inf")


def _check_profile(profile) -> None:
    if profile.support > 1.0 + 1e-12:
        raise SupportError(
            f"profile Fourier support {profile.support:g} exceeds the admissible range (-1, 1)")


def montgomery_prediction(profile, nodes: int = 256) -> float:
    """f(0) + int f(u) (1 - sinc(u)^2) du, evaluated on the Fourier side as
    f(0) + fhat(0) - int_{-1}^{1} fhat(alpha) (1 - |alpha|) d alpha."""
    _check_profile(profile)
    x, w = _leggauss(nodes)
    b = profile.support
    a = 0.5 * b * (x + 1.0)
    overlap = 2.0 * np.sum(0.5 * b * w * profile.fourier(a) * (1.0 - a))
    return float(profile(0.0) + profile.fourier(0.0) - overlap)


# ---------------------------------------------------------------------------
# windowed pair sums

def _pair_sum(x: np.ndarray, w1: np.ndarray, w2: np.ndarray, kernel: Callable, U: float,
              raw: np.ndarray | None = None, factor: Callable | None = None) -> tuple[float, float]:
    """sum_{i,j} w1_i w2_j k(x_i - x_j) [factor(raw_i - raw_j)] over |x_i - x_j| <= U.

    ``x`` must be sorted.  Returns (total, diagonal part).
    """
    k0 = float(kernel(0.0))
    diag = float(np.sum(w1 * w2) * k0)
    total = diag
    for off in range(1, x.size):
        d = x[off:] - x[:-off]  # x_j - x_i for j = i + off
        if d.min() > U:
            break
        mask = d <= U
        kd = kernel(np.where(mask, d, 0.0)) * mask
        km = kernel(np.where(mask, -d, 0.0)) * mask
        if factor is not None:
            r = raw[off:] - raw[:-off]
            kd = kd * factor(r)
            km = km * factor(-r)
        # pairs (i, j=i+off): w1_i w2_j k(x_i - x_j) = k(-d); and the transposed pair
        total += float(np.sum(w1[:-off] * w2[off:] * km) + np.sum(w1[off:] * w2[:-off] * kd))
    return total, diag


def _montgomery_factor(r):
    return 4.0 / (4.0 + np.asarray(r) ** 2)


@dataclass(frozen=True)
class MontgomeryResult:
    value: float
    prediction: float
    pair_sum: float
    diagonal: float
    normaliser: float
    count: int
    T_cut: float
    normalisation: str
    window: str

    @property
    def relative_deviation(self) -> float:
        return abs(self.value - self.prediction) / abs(self.prediction)


def montgomery_statistic(zeros: ZeroDataset, profile, T_cut: float | None = None,
                         normalisation: str = "unfolded", window: str = "sharp",
                         weights: Sequence[WeightSpec] | None = None,
                         T_weight: float | None = None, mirror: bool = False,
                         convergence_factor: bool = False, U: float = 2000.0) -> MontgomeryResult:
    """Ordered-pair statistic sum f(x_gamma - x_gamma') including gamma = gamma'.

    ``window="sharp"`` uses the ordinates 0 < gamma <= T_cut with unit weight;
    ``window="weighted"`` multiplies by h_1(gamma/T) h_2(gamma'/T) instead.
    ``mirror`` adds the negative ordinates -gamma.  ``convergence_factor``
    inserts 4 / (4 + (gamma - gamma')^2).  Pairs beyond |x - x'| > U are
    dropped (the profile's tail bound is reported through ``tail_mass``).

    The value is the pair sum divided by the expected number of (weighted)
    zeros, so that it is directly comparable to :func:`montgomery_prediction`.
    """
    _check_profile(profile)
    gamma = zeros.up_to(T_cut)
    T_cut = float(gamma[-1]) if T_cut is None else float(T_cut)
    if mirror:
        gamma = np.concatenate([-gamma[::-1], gamma])
    x = _coordinates(gamma, normalisation, T_cut)
    if window == "sharp":
        w1 = w2 = np.ones_like(gamma)
    elif window == "weighted":
        if weights is None or len(weights) != 2 or T_weight is None:
            raise ConfigError("weighted window needs two weights and T_weight")
        w1 = h_eval(weights[0], gamma / T_weight)
        w2 = h_eval(weights[1], gamma / T_weight)
    else:
        raise ConfigError("window must be 'sharp' or 'weighted'")
    factor = _montgomery_factor if convergence_factor else None
    total, diag = _pair_sum(x, w1, w2, profile, U, raw=gamma, factor=factor)
    if normalisation == "unfolded":
        normaliser = float(np.sum(w1 * w2))
    elif window == "sharp":
        normaliser = (2.0 if mirror else 1.0) * T_cut * math.log(T_cut) / TWO_PI
    else:
        normaliser = (T_weight * math.log(T_cut) / TWO_PI
                      * kappa(weights) * (1.0 if mirror else 0.5))
    return MontgomeryResult(total / normaliser, montgomery_prediction(profile), total, diag,
                            normaliser, int(gamma.size), T_cut, normalisation, window)


# ---------------------------------------------------------------------------
# weighted n-tuple sums

@dataclass(frozen=True)
class ZetaCorrelation:
    value: float
    rs_prediction: float
    conjectural: bool
    n: int
    T_cut: float
    T_weight: float
    logscale: float
    normalisation: str

    @property
    def relative_deviation(self) -> float:
        return abs(self.value - self.rs_prediction) / abs(self.rs_prediction)


def effective_logscale(weights: Sequence[WeightSpec], T_weight: float) -> float:
    """int prod h_j(x) log(T |x| / 2 pi) dx / kappa(h): the logarithm of the
    zero density averaged against the weights.

    Written as log(T / 2 pi) + int prod h_j(x) log|x| dx / kappa; the
    logarithmic singularity on [0, 1] is handled by a log-weighted rule and
    the smooth remainder by Simpson's rule on the cached h grid.
    """
    def prod(x):
        out = np.ones_like(np.atleast_1d(np.asarray(x, dtype=float)))
        for w in weights:
            out = out * h_eval(w, x)
        return out

    near = integrate.quad(lambda x: float(prod(x)[0]), 0.0, 1.0, weight="alg-loga",
                          wvar=(0.0, 0.0), epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    x = min(weights, key=lambda w: w.grid[0][1]).grid[0]
    x = x[x >= 1.0]
    far = integrate.simpson(prod(x) * np.log(x), x=x)
    return float(math.log(T_weight / TWO_PI) + 2.0 * (near + far) / kappa(weights))


def _default_T_weight(weights: Sequence[WeightSpec], T_cut: float, tol: float = 1e-3) -> float:
    from .contour import _h_decay_point

    return T_cut / max(_h_decay_point(w, tol) for w in weights)


def zeta_n_correlation(zeros: ZeroDataset, phi: PhiSpec, weights: Sequence[WeightSpec],
                       T_cut: float | None = None, n: int | None = None,
                       T_weight: float | None = None, normalisation: str = "unfolded",
                       force: bool = False) -> ZetaCorrelation:
    """sum over all n-tuples of (mirrored) zeros of prod h_j(gamma_j / T) f(x_1, ..., x_n).

    ``x`` are the rescaled ordinates (see the module docstring).  The
    prediction is :func:`ncorr.rs_main.rs_sarnak_form` with ``logscale``
    log T (asymptotic) or the weight-averaged log density (unfolded).
    Phi with total support >= 2 is outside the proven range and raises
    SupportError unless ``force`` is set, in which case the result is
    flagged conjectural.

    ``T_weight`` defaults to T_cut / x*, where |h(x)| < 1e-3 h(0) beyond x*,
    so that the weights have essentially died out by the top of the data.
    """
    from .rs_main import rs_sarnak_form

    n = phi.n if n is None else n
    if n != phi.n or len(weights) != n:
        raise ConfigError("arity mismatch between n, phi and weights")
    if n > 3:
        raise SizeError("zeta n-correlation implemented for n <= 3")
    conjectural = phi.q > 1 or phi.budget >= 2.0
    if conjectural and not force:
        raise SupportError(f"Phi support budget {phi.budget:g} (q={phi.q:g}) is outside "
                           "the proven range; pass force=True to compute anyway")
    gamma = zeros.up_to(T_cut)
    T_cut = float(gamma[-1]) if T_cut is None else float(T_cut)
    if T_weight is None:
        T_weight = _default_T_weight(weights, T_cut)
    gamma = np.concatenate([-gamma[::-1], gamma])
    x = _coordinates(gamma, normalisation, T_cut)
    hw = [h_eval(w, gamma / T_weight) for w in weights]
    phi0 = phi.c * np.exp(-1.0)

    if n == 1:
        value = float(phi0 * np.sum(hw[0]))
    elif n == 2:
        value, _ = _pair_sum(x, hw[0], hw[1], PairProfile(phi), 450.0 / (TWO_PI * phi.s))
    else:
        value = _triple_sum(x, hw, phi)

    logscale = (effective_logscale(weights, T_weight) if normalisation == "unfolded"
                else math.log(T_cut))
    pred = rs_sarnak_form(n, phi, weights, T_weight=T_weight, logscale=logscale)
    return ZetaCorrelation(float(value), float(pred), bool(conjectural), n, T_cut,
                           float(T_weight), float(logscale), normalisation)


def _triple_sum(x: np.ndarray, hw: Sequence[np.ndarray], phi: PhiSpec, rel_cut: float = 1e-13) -> float:
    """Anchor on the third index; f depends on (x_i - x_k, x_j - x_k)."""
    U = 450.0 / (TWO_PI * phi.s)
    h1, h2, h3 = hw
    scale = np.max(np.abs(h1)) * np.max(np.abs(h2)) * np.max(np.abs(h3))
    lo = np.searchsorted(x, x - U, side="left")
    hi = np.searchsorted(x, x + U, side="right")
    total = 0.0
    for k in np.nonzero(np.abs(h3) * np.max(np.abs(h1)) * np.max(np.abs(h2)) > rel_cut * scale)[0]:
        sl = slice(lo[k], hi[k])
        w = -2j * np.pi * (x[sl] - x[k])
        grid = np.real(hyperplane_transform(phi, [w, w]))
        total += h3[k] * float(h1[sl] @ grid @ h2[sl])
    return total
