"""Contour-integral evaluation of the n-correlation of wrapped CUE eigenangles.

For every ordered partition (K, L, M) of the variables, z_k runs on Re z = delta
(k in K), z_l on Re z = -delta (l in L) and z_m on the imaginary axis; the
integrand is J*(z_K; -z_L) F(iz_1, ..., iz_n).  With every path oriented
upwards the contributions simply add:

    E sum_j F(theta_j1, ..., theta_jn)
        = (2 pi)^{-n} sum_{K,L,M} N^{|M|} int J*(z_K; -z_L) F(iz) dt_1 ... dt_n,

where z_j = c_j + i t_j.  (Orienting the -delta and imaginary-axis paths
downwards instead produces an extra (-1)^{|L|+|M|} on each term.)

Quadrature
----------
The integrand is band-limited in every t_j (its spectrum is bounded by
N*s + N*|S|max + Delta/T plus an exponentially decaying tail from the
periodic z-factors), so the trapezoid rule on the lattice t_j = eta*k_j + o_j
with 2*pi/eta above that band is exact up to the tails.  Because J* and f
depend only on differences z_j - z_n, the n-fold lattice sum regroups into

    eta^n sum_d Psi(d) W(d),   W(d) = sum_k prod_j H_j[k + d_j],

with H_j[k] = h_j(i z_j / T) sampled on one line per variable.  The offsets
o_j = eta*j/n keep every difference z_j - z_k (same abscissa) off the poles of
the z-factors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._kernels import lattice_correlate
from .combinatorics import Partition3, enum_partition3, enum_permutations
from .errors import ConfigError, TailError
from .jstar import jstar, jstar_q1_closed_form
from .results import CorrelationResult
from .special_functions import logz_deriv2
from .test_functions import PhiSpec, WeightSpec, f_eval, h_eval, h_line, hyperplane_transform

__all__ = [
    "ContourSpec",
    "BigF",
    "bigF_eval",
    "correlation_contour",
    "correlation_contour_q1",
    "contour_term_q1",
    "decay_probe",
    "DecayRow",
]

# |Fourier transform| of the bump products involved drops below ~1e-11 of its
# peak beyond this many radians per half-width
_F_TAIL_OMEGA = 420.0
# Fourier coefficients of the periodic z-factors decay like e^{-2 delta m}
_PERIODIC_TAIL = 36.0


@dataclass(frozen=True)
class ContourSpec:
    """Quadrature settings for the vertical-path integrals.

    ``delta=None`` picks ``min(0.4, 8 / (N s))``: on the shifted paths f grows
    like exp(2 N s delta) and the terms cancel down to O(1), so the abscissa
    must shrink with N to keep the cancellation within double precision.
    ``nodes_per_axis`` is the number of lattice points per 2*pi of Im z
    (``None`` picks it from the integrand's bandwidth); ``t_max=None`` picks
    the truncation by doubling until the weights fall below ``tail_tol``.
    """

    delta: float | None = None
    t_max: float | None = None
    nodes_per_axis: int | None = None
    tail_tol: float = 1e-10
    error_estimate: bool = True

    def __post_init__(self):
        if self.delta is not None and self.delta <= 0:
            raise ConfigError("contour abscissa delta must be positive")
        if self.t_max is not None and self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.nodes_per_axis is not None and self.nodes_per_axis < 4:
            raise ConfigError("nodes_per_axis must be at least 4")


_AUTO_DELTA_MAX = 0.4
_AUTO_DELTA_GROWTH = 16.0


def _resolve_contour(F: "BigF", contour: ContourSpec) -> ContourSpec:
    if contour.delta is not None:
        return contour
    delta = min(_AUTO_DELTA_MAX, _AUTO_DELTA_GROWTH / (2.0 * F.N * F.phi.s))
    return replace(contour, delta=delta)


@dataclass(frozen=True)
class BigF:
    """F(x) = f(N x / 2 pi) * prod_j h_j(x_j / T)."""

    phi: PhiSpec
    weights: tuple
    N: int
    T_weight: float

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.phi.n:
            raise ConfigError(f"need {self.phi.n} weights, got {len(self.weights)}")
        if self.N < 1 or self.T_weight <= 0:
            raise ConfigError("N must be >= 1 and T_weight > 0")

    @property
    def n(self) -> int:
        return self.phi.n

    def describe(self) -> dict:
        return {
            "n": self.n, "N": self.N, "T": self.T_weight,
            "phi": {"q": self.phi.q, "eps": self.phi.eps, "s": self.phi.s, "c": self.phi.c},
            "weights": [{"delta": w.delta, "amplitude": w.amplitude} for w in self.weights],
        }


def bigF_eval(F: BigF, x) -> complex:
    """F at one (possibly complex) point x of length n."""
    x = np.asarray(x, dtype=complex)
    val = f_eval(F.phi, F.N * x / (2.0 * np.pi))
    for w, xj in zip(F.weights, x):
        val *= complex(h_eval(w, xj / F.T_weight))
    return complex(val)


# ---------------------------------------------------------------------------
# lattice planning

@dataclass
class _Plan:
    P: int
    eta: float
    offsets: np.ndarray
    D: int
    K0: int

    @property
    def t_max(self) -> float:
        return self.K0 * self.eta


def _bandwidth(F: BigF, max_stratum: int) -> float:
    return (F.N * F.phi.s + F.N * max_stratum
            + max(w.delta for w in F.weights) / F.T_weight)


def _h_decay_point(w: WeightSpec, tol: float) -> float:
    """Smallest x beyond which |h| stays below tol * h(0) on the cached grid."""
    x, v = w.grid
    env = np.maximum.accumulate(np.abs(v)[::-1])[::-1]
    above = np.nonzero(env >= tol * abs(v[0]))[0]
    if above.size == 0:
        return float(x[1])
    idx = above[-1] + 1
    return float(x[min(idx, x.size - 1)])


def _plan(F: BigF, contour: ContourSpec, max_stratum: int, P: int | None = None) -> _Plan:
    n = F.n
    if P is None:
        if contour.nodes_per_axis is not None:
            P = contour.nodes_per_axis
        else:
            P = int(math.ceil(_bandwidth(F, max_stratum) + _PERIODIC_TAIL / (2 * contour.delta)))
    eta = 2.0 * np.pi / P
    offsets = eta * np.arange(n) / n
    if n > 1:
        D = int(math.ceil(_F_TAIL_OMEGA / (F.N * eta * F.phi.s)))
    else:
        D = 0
    if contour.t_max is not None:
        t_max = contour.t_max
    else:
        x_star = max(_h_decay_point(w, contour.tail_tol) for w in F.weights)
        t_max = 1.1 * F.T_weight * x_star + D * eta
    K0 = int(math.ceil(t_max / eta))
    return _Plan(P=P, eta=eta, offsets=offsets, D=D, K0=K0)


def _abscissae(part: Partition3, n: int, delta: float) -> np.ndarray:
    c = np.zeros(n)
    c[list(part.K)] = delta
    c[list(part.L)] = -delta
    return c


def _lines(F: BigF, c: np.ndarray, plan: _Plan, contour: ContourSpec, cache: dict):
    """H_j[k] = h_j(i z_j / T) with z_j = c_j + i (eta k + o_j), k = -K0..K0."""
    out = []
    L = 2 * plan.K0 + 1
    for j, w in enumerate(F.weights):
        key = (j, float(c[j]))
        if key not in cache:
            t0 = -plan.K0 * plan.eta + plan.offsets[j]
            x0 = (1j * c[j] - t0) / F.T_weight
            H = h_line(w, x0, -plan.eta / F.T_weight, L)
            edge = max(1, L // 100)
            tail = max(np.max(np.abs(H[:edge])), np.max(np.abs(H[-edge:])))
            ratio = tail / np.max(np.abs(H))
            if ratio > contour.tail_tol:
                raise TailError(
                    f"weight {j}: |h| at t_max={plan.t_max:g} is {ratio:.2e} of its peak "
                    f"(tail_tol {contour.tail_tol:g})")
            cache[key] = H
        out.append(cache[key])
    return out


def _difference_axes(F: BigF, c: np.ndarray, plan: _Plan):
    """z_j (j < n) as broadcastable arrays along their own axis, z_n as scalar.

    Translation invariance lets z_n sit at c_n; z_j - z_n carries the lattice
    difference eta*d_j + o_j - o_n.
    """
    n = F.n
    d = np.arange(-plan.D, plan.D + 1)
    zs = []
    for j in range(n - 1):
        shape = [1] * (n - 1)
        shape[j] = d.size
        tau = plan.eta * d + plan.offsets[j] - plan.offsets[n - 1]
        zs.append((c[j] + 1j * tau).reshape(shape))
    zs.append(complex(c[n - 1]))
    return zs


def _psi(F: BigF, part: Partition3, c: np.ndarray, plan: _Plan, mode: str,
         q: int | None, only_size: int | None, sigma=None) -> np.ndarray:
    """J-factor times f(i N z / 2 pi) on the difference lattice."""
    n = F.n
    if n == 1:
        fval = F.phi.c * np.exp(-1.0)
        return np.array(fval, dtype=complex)
    zs = _difference_axes(F, c, plan)
    A = [zs[k] for k in part.K]
    B = [-zs[l] for l in part.L]
    if mode == "q1":
        J = jstar_q1_closed_form(A, B)
    elif mode == "sigma":
        J = 1.0
        for kj, lj in zip(part.K, (part.L[i] for i in sigma)):
            J = J * logz_deriv2(zs[kj] - zs[lj])
    else:
        J = jstar(A, B, F.N, q, only_size=only_size, validate=False)
    w_axes = [F.N * (np.ravel(zs[j]) - zs[n - 1]) for j in range(n - 1)]
    fgrid = hyperplane_transform(F.phi, w_axes)
    return np.broadcast_to(J, fgrid.shape) * fgrid


def _structurally_zero(part: Partition3, q: int | None) -> bool:
    if bool(part.K) != bool(part.L):
        return True  # J*(A, {}) = 0 = J*({}, B) for nonempty A, B
    if q == 1 and len(part.K) != len(part.L):
        return True
    return False


def _boundary_ratio(arr: np.ndarray) -> float:
    peak = np.max(np.abs(arr))
    if peak == 0 or arr.ndim == 0:
        return 0.0
    edge = 0.0
    for ax in range(arr.ndim):
        edge = max(edge, np.max(np.abs(np.take(arr, [0, -1], axis=ax))))
    return float(edge / peak)


_MAX_D_GROWTH = 4.0


def _term(F, part, c, plan, contour, cache, mode, q, only_size, sigma=None):
    H = _lines(F, c, plan, contour, cache)
    D0 = plan.D
    while True:
        psi = _psi(F, part, c, plan, mode, q, only_size, sigma)
        W = lattice_correlate(H, plan.D)
        integrand = psi * W
        ratio = _boundary_ratio(integrand)
        if ratio <= contour.tail_tol:
            break
        # the radius estimate from the decay of f ignores the J-factor; widen
        # the difference lattice before giving up
        if plan.D >= _MAX_D_GROWTH * D0 or plan.D >= plan.K0:
            raise TailError(f"difference-lattice truncation D={plan.D} leaves {ratio:.2e} at the edge")
        plan = replace(plan, D=min(int(math.ceil(1.5 * plan.D)), plan.K0))
    return plan.eta ** F.n * complex(np.sum(integrand)), psi, H


def _check_regime(F: BigF):
    if F.N < 4 * F.n:
        warnings.warn(f"N={F.N} is small compared with 4n={4 * F.n}; the contour "
                      "formula is still exact but strata cancel less cleanly",
                      RuntimeWarning, stacklevel=3)
    if F.n > 3:
        raise ConfigError("contour quadrature is implemented for n <= 3")


def _evaluate(F: BigF, contour: ContourSpec, q, mode: str, P=None):
    n = F.n
    max_stratum = 0 if (mode == "q1" or q == 1) else (n // 2 if q is None else min(n // 2, q - 1))
    plan = _plan(F, contour, max_stratum, P)
    cache: dict = {}
    parts = enum_partition3(n, require_equal_KL=(mode == "q1"))
    terms = []
    total = 0j
    for part in parts:
        if _structurally_zero(part, 1 if mode == "q1" else q):
            continue
        c = _abscissae(part, n, contour.delta)
        val, _, _ = _term(F, part, c, plan, contour, cache, mode, q, None)
        val *= F.N ** len(part.M) / (2.0 * np.pi) ** n
        terms.append((part, val))
        total += val
    return total, plan, terms


def _run(F: BigF, contour: ContourSpec, q, mode: str) -> CorrelationResult:
    _check_regime(F)
    contour = _resolve_contour(F, contour)
    value, plan, terms = _evaluate(F, contour, q, mode)
    error = 0.0
    P_used = plan.P
    if contour.error_estimate:
        fine, plan2, terms = _evaluate(F, contour, q, mode, P=2 * plan.P)
        error = abs(fine - value)
        value, P_used = fine, plan2.P
    params = F.describe()
    params.update({
        "q": "full" if q is None else q, "mode": mode, "delta": contour.delta,
        "lattice_points_per_2pi": P_used, "t_max": plan.t_max, "difference_radius": plan.D,
        "terms": len(terms),
    })
    return CorrelationResult(value, error, "contour", params)


def correlation_contour(F: BigF, contour: ContourSpec = ContourSpec(),
                        q: int | str | None = None) -> CorrelationResult:
    """Sum of all (K, L, M) contour terms with J* (``q`` None or "full") or J_q*."""
    if q == "full":
        q = None
    if q is not None and (not isinstance(q, (int, np.integer)) or q < 1):
        raise ConfigError("q must be a positive integer or 'full'")
    return _run(F, contour, q, "jstar")


def correlation_contour_q1(F: BigF, contour: ContourSpec = ContourSpec()) -> CorrelationResult:
    """Only |K| = |L| partitions, with the permanent of (z'/z)' factors."""
    return _run(F, contour, 1, "q1")


def contour_term_q1(F: BigF, K: Sequence[int], L: Sequence[int], sigma: Sequence[int],
                    contour: ContourSpec = ContourSpec()) -> complex:
    """I(K, L, sigma): the integral of prod_j (z'/z)'(z_{k_j} - z_{l_sigma(j)}) F(iz),
    with the -delta and imaginary-axis paths oriented downwards (so that it
    pairs with the (-1)^{|L|+|M|} N^{|M|} / (2 pi i)^n prefactor)."""
    n = F.n
    K, L = tuple(K), tuple(L)
    if len(K) != len(L) or set(K) & set(L):
        raise ConfigError("K and L must be disjoint and of equal size")
    M = tuple(i for i in range(n) if i not in K and i not in L)
    part = Partition3(K, L, M)
    contour = _resolve_contour(F, contour)
    plan = _plan(F, contour, 0)
    c = _abscissae(part, n, contour.delta)
    val, _, _ = _term(F, part, c, plan, contour, {}, "sigma", 1, None, tuple(sigma))
    # upward orientation: dz = i dt on each of the n paths
    val *= 1j ** n
    return (-1) ** (len(L) + len(M)) * val


@dataclass
class DecayRow:
    delta: float
    integral: complex
    peak: float
    base_peak: float

    @property
    def suppression(self) -> float:
        """Peak of the probed stratum relative to the |S| = 0 stratum."""
        return self.peak / self.base_peak if self.base_peak else float("inf")


@dataclass
class DecayProbe:
    S_size: int
    rows: list = field(default_factory=list)

    @property
    def slope(self) -> float:
        """Least-squares slope of log(peak) against delta."""
        d = np.array([r.delta for r in self.rows])
        y = np.log([r.peak for r in self.rows])
        return float(np.polyfit(d, y, 1)[0])

    def table(self) -> list[str]:
        lines = [f"{'delta':>8s} {'|integral|':>12s} {'peak':>12s} {'suppression':>12s}"]
        for r in self.rows:
            lines.append(f"{r.delta:8.3f} {abs(r.integral):12.4e} {r.peak:12.4e} "
                         f"{r.suppression:12.4e}")
        lines.append(f"slope d log(peak)/d delta = {self.slope:.4f}")
        return lines


def decay_probe(F: BigF, deltas: Sequence[float], S_size: int,
                contour: ContourSpec = ContourSpec()) -> DecayProbe:
    """Evaluate the single stratum |S| = |T| = S_size at each abscissa delta.

    Each row records the stratum's integral, the peak modulus of its
    integrand on the lattice (max |Psi| * prod max |H_j|) and the same peak
    for the |S| = 0 stratum.
    """
    _check_regime(F)
    n = F.n
    probe = DecayProbe(S_size)
    for delta in deltas:
        cspec = ContourSpec(delta=delta, t_max=contour.t_max,
                            nodes_per_axis=contour.nodes_per_axis, tail_tol=contour.tail_tol,
                            error_estimate=False)
        plan = _plan(F, cspec, max(S_size, 1))
        cache: dict = {}
        integral = 0j
        peak = 0.0
        base = 0.0
        for part in enumerate_partitions_with_stratum(n, S_size):
            c = _abscissae(part, n, delta)
            val, psi, H = _term(F, part, c, plan, cspec, cache, "jstar", None, S_size)
            integral += val * F.N ** len(part.M) / (2.0 * np.pi) ** n
            hmax = float(np.prod([np.max(np.abs(h)) for h in H]))
            peak = max(peak, float(np.max(np.abs(psi))) * hmax)
            psi0 = _psi(F, part, c, plan, "jstar", None, 0)
            base = max(base, float(np.max(np.abs(psi0))) * hmax)
        probe.rows.append(DecayRow(delta, integral, peak, base))
    return probe


def enumerate_partitions_with_stratum(n: int, S_size: int):
    """Partitions whose J* factor has a non-trivial |S| = |T| = S_size stratum."""
    for part in enum_partition3(n):
        if part.K and part.L and min(len(part.K), len(part.L)) >= S_size:
            yield part
