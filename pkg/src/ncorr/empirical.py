"""Monte Carlo and quadrature estimators of eigenangle correlation sums.

Two different statistics live here and must not be confused:

* the *distinct-tuple* sum over base eigenangles,
  ``sum_{i_1..i_n distinct} F(theta_{i_1}, ..., theta_{i_n})`` for 2 pi-periodic F
  (:func:`mc_distinct_tuples`, :func:`determinantal_value`, :func:`small_N_oracle`);
* the *wrapped weighted* sum over all integer index tuples of the periodically
  extended angle sequence, equal indices included
  (:func:`mc_wrapped_weighted`, :func:`wrapped_determinantal_value`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._kernels import table_pair_sum
from .errors import ConfigError, SizeError
from .results import CorrelationResult
from .rmt import EigenangleSample, SampleBatch, weyl_density
from .special_functions import sn_kernel
from .test_functions import (
    PhiSpec,
    WeightSpec,
    _leggauss,
    g_eval,
    gl_nodes_for,
    h_eval,
    hyperplane_transform,
)

__all__ = [
    "CorrelationResult",
    "TorusFunction",
    "mc_distinct_tuples",
    "determinantal_value",
    "small_N_oracle",
    "kernel_determinant",
    "pair_profile",
    "weight_autocorrelation",
    "default_k_range",
    "wrapped_determinantal_value",
    "mc_wrapped_weighted",
]

TWO_PI = 2.0 * np.pi
_TAIL_OMEGA = 450.0


# ---------------------------------------------------------------------------
# periodic test functions on the torus

@dataclass(frozen=True)
class TorusFunction:
    """Real trigonometric polynomial F(theta) = sum_m a_m cos(m . theta + p_m).

    ``freqs`` has shape (terms, n).  Band-limited by construction, hence
    integrated exactly by the periodic trapezoid rule with enough nodes.
    """

    freqs: np.ndarray
    amps: np.ndarray
    phases: np.ndarray

    @property
    def n(self) -> int:
        return self.freqs.shape[1]

    @property
    def degree(self) -> int:
        return int(np.max(np.abs(self.freqs))) if self.freqs.size else 0

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        arg = theta @ self.freqs.T.astype(float) + self.phases
        return np.cos(arg) @ self.amps

    @classmethod
    def random(cls, n: int, degree: int = 3, seed: int = 0) -> "TorusFunction":
        """All frequency vectors with |m_j| <= degree, random amplitudes."""
        rng = np.random.default_rng(seed)
        freqs = np.array(list(itertools.product(range(-degree, degree + 1), repeat=n)))
        amps = rng.uniform(-1.0, 1.0, len(freqs)) / (1.0 + np.abs(freqs).sum(axis=1))
        phases = rng.uniform(0.0, TWO_PI, len(freqs))
        return cls(freqs, amps, phases)


def _as_batch(samples) -> np.ndarray:
    if isinstance(samples, SampleBatch):
        return samples.angles
    if isinstance(samples, EigenangleSample):
        return samples.angles[None, :]
    if isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], EigenangleSample):
        return np.stack([s.angles for s in samples])
    arr = np.asarray(samples, dtype=float)
    return arr[None, :] if arr.ndim == 1 else arr


def _mc_result(stats: np.ndarray, params: dict) -> CorrelationResult:
    m = stats.shape[0]
    mean = stats.mean()
    err = stats.std(ddof=1) / math.sqrt(m) if m > 1 else 0.0
    params = dict(params, matrices=m)
    return CorrelationResult(mean, float(err), "mc", params)


def mc_distinct_tuples(samples, F_callable: Callable, n: int, budget: float = 2e8,
                       chunk_elems: int = 4_000_000) -> CorrelationResult:
    """Average over matrices of sum_{distinct i_1..i_n} F(theta_{i_1}, ..., theta_{i_n}).

    ``F_callable`` maps arrays of shape (..., n) to (...).  The standard error
    is computed at matrix granularity.
    """
    angles = _as_batch(samples)
    count, N = angles.shape
    if n > N:
        raise SizeError(f"n={n} exceeds N={N}")
    tuples = math.perm(N, n)
    if tuples * count > budget:
        raise SizeError(f"{tuples} tuples x {count} matrices exceeds budget {budget:g}")
    idx = np.array(list(itertools.permutations(range(N), n)), dtype=np.intp).reshape(-1, n)
    stats = np.empty(count)
    step = max(1, chunk_elems // max(1, tuples * n))
    for start in range(0, count, step):
        block = angles[start:start + step][:, idx]  # (b, tuples, n)
        stats[start:start + step] = np.real(F_callable(block)).sum(axis=1)
    return _mc_result(stats, {"n": n, "N": N, "statistic": "distinct"})


def kernel_determinant(theta: np.ndarray, N: int) -> np.ndarray:
    """det_{n x n} S_N(theta_k - theta_j) for theta of shape (..., n)."""
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[-1]
    if n == 1:
        return np.full(theta.shape[:-1], float(N))
    if n == 2:
        a = sn_kernel(theta[..., 0] - theta[..., 1], N)
        return N * N - a * a
    if n == 3:
        a = sn_kernel(theta[..., 0] - theta[..., 1], N)
        b = sn_kernel(theta[..., 0] - theta[..., 2], N)
        c = sn_kernel(theta[..., 1] - theta[..., 2], N)
        return N**3 + 2.0 * a * b * c - N * (a * a + b * b + c * c)
    diff = theta[..., :, None] - theta[..., None, :]
    return np.linalg.det(sn_kernel(diff, N))


def _torus_grid(m: int, n: int, jitter: Sequence[float]) -> np.ndarray:
    axes = [TWO_PI * (np.arange(m) + jitter[j]) / m for j in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


def _det_quadrature(F_callable, N, n, m):
    jitter = [(j + 1) / (n + 2) for j in range(n)]
    grid = _torus_grid(m, n, jitter)
    # one slab of the first axis at a time keeps F's intermediates small
    total = 0.0
    for slab in grid:
        total += float(np.sum(np.real(F_callable(slab)) * kernel_determinant(slab, N)))
    return total / m**n


def determinantal_value(F_callable: Callable, N: int, n: int, nodes: int = 64) -> CorrelationResult:
    """(2 pi)^{-n} int_{[0,2pi]^n} F(theta) det S_N(theta_k - theta_j) dtheta.

    Periodic trapezoid rule with ``nodes`` and ``2*nodes`` points per axis
    (jittered off the diagonal); the difference is the error estimate.
    """
    if n > 3:
        raise SizeError("tensor quadrature limited to n <= 3")
    coarse = _det_quadrature(F_callable, N, n, nodes)
    fine = _det_quadrature(F_callable, N, n, 2 * nodes)
    return CorrelationResult(fine, abs(fine - coarse), "determinant",
                             {"n": n, "N": N, "nodes": 2 * nodes})


def _oracle_quadrature(F_callable, N, n, m):
    grid = _torus_grid(m, N, [0.5 * j / N for j in range(N)])  # (m,)*N + (N,)
    acc = 0.0
    for slab in grid:
        total = np.zeros(slab.shape[:-1])
        for tup in itertools.permutations(range(N), n):
            total = total + np.real(F_callable(slab[..., list(tup)]))
        acc += float(np.sum(total * weyl_density(slab)))
    return acc / m**N / math.factorial(N)


def small_N_oracle(F_callable: Callable, N: int, n: int, nodes: int | None = None) -> CorrelationResult:
    """Haar average of the distinct-tuple sum by direct quadrature of the
    Weyl density over [0, 2 pi]^N (no sampling, no determinant)."""
    if N > 3:
        raise SizeError("the direct Weyl quadrature oracle supports N <= 3")
    if n > N:
        raise SizeError("n must not exceed N")
    if nodes is None:
        deg = getattr(F_callable, "degree", 8)
        nodes = 2 * (deg + N) + 2
    coarse = _oracle_quadrature(F_callable, N, n, nodes)
    fine = _oracle_quadrature(F_callable, N, n, 2 * nodes)
    return CorrelationResult(fine, abs(fine - coarse), "oracle",
                             {"n": n, "N": N, "nodes": 2 * nodes})


# ---------------------------------------------------------------------------
# wrapped weighted statistic

def pair_profile(phi: PhiSpec, y) -> np.ndarray:
    """phi2(y) = f(y, 0) for n = 2, i.e. int Phi(xi, -xi) e(-y xi) dxi (real, even)."""
    if phi.n != 2:
        raise ConfigError("pair profile needs a 2-variable Phi")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return np.real(hyperplane_transform(phi, [-2j * np.pi * y]))


def weight_autocorrelation(w1: WeightSpec, w2: WeightSpec, T_weight: float, u) -> np.ndarray:
    """int h1(x/T) h2((x-u)/T) dx = 2 pi T int g1(t) g2(-t) e^{iut/T} dt."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    width = min(w1.delta, w2.delta)
    m = gl_nodes_for(float(np.max(np.abs(u))) * width / T_weight, minimum=128)
    x, w = _leggauss(m)
    t = width * x
    wt = width * w * g_eval(w1, t) * g_eval(w2, -t)
    return np.real(TWO_PI * T_weight * (np.exp(1j * np.multiply.outer(u / T_weight, t)) @ wt))


def default_k_range(weights: Sequence[WeightSpec], T_weight: float, tol: float = 1e-12) -> int:
    """Wrapping depth so that h(theta/T) has decayed below ``tol`` of h(0)."""
    from .contour import _h_decay_point

    x_star = max(_h_decay_point(w, tol) for w in weights)
    return int(math.ceil(T_weight * x_star / TWO_PI)) + 1


def _pair_window(phi: PhiSpec, N: int) -> float:
    """|u| beyond which phi2(N u / 2 pi) is negligible."""
    return _TAIL_OMEGA / (N * phi.s)


def wrapped_determinantal_value(phi: PhiSpec, weights: Sequence[WeightSpec], N: int,
                                T_weight: float, step: float | None = None) -> CorrelationResult:
    """Exact Haar average of the wrapped weighted sum (n = 1 or 2).

    For n = 2 the sum splits into distinct base indices, which unfold to
    (2 pi)^{-2} int phi2(N u/2 pi) (N^2 - S_N(u)^2) W(u) du, and coincident
    base indices, giving (N / 2 pi) sum_j phi2(-N j) W(-2 pi j); W is
    :func:`weight_autocorrelation`.  The u-integrand is band-limited, so the
    trapezoid rule is exact once the step is below 2 pi / bandwidth.
    """
    n = phi.n
    if len(weights) != n:
        raise ConfigError("need one weight per variable")
    params = {"n": n, "N": N, "T": T_weight, "statistic": "wrapped"}
    if n == 1:
        val = N / TWO_PI * phi.c * np.exp(-1.0) * TWO_PI * T_weight * float(g_eval(weights[0], 0.0))
        return CorrelationResult(val, 0.0, "determinant", params)
    if n != 2:
        raise ConfigError("wrapped determinantal value implemented for n <= 2")
    w1, w2 = weights
    band = N * phi.s + N + (w1.delta + w2.delta) / T_weight
    if step is None:
        step = 0.5 * TWO_PI / band
    U = _pair_window(phi, N)

    def integral(h):
        K = int(math.ceil(U / h))
        u = h * (np.arange(-K, K + 1) + 0.5)
        vals = (pair_profile(phi, N * u / TWO_PI) * (N * N - sn_kernel(u, N) ** 2)
                * weight_autocorrelation(w1, w2, T_weight, u))
        return h * vals.sum() / TWO_PI**2

    coarse, fine = integral(step), integral(step / 2)
    jmax = int(math.ceil(U / TWO_PI)) + 1
    j = np.arange(-jmax, jmax + 1)
    diag = N / TWO_PI * np.sum(pair_profile(phi, -N * j.astype(float))
                               * weight_autocorrelation(w1, w2, T_weight, -TWO_PI * j))
    params["step"] = step / 2
    return CorrelationResult(fine + diag, abs(fine - coarse), "determinant", params)


def _table(fun, U: float, du: float):
    m = int(math.ceil(U / du)) + 3
    u = du * np.arange(-m, m + 1)
    return fun(u), float(u[0]), du


def mc_wrapped_weighted(samples, phi: PhiSpec, weights: Sequence[WeightSpec], N: int,
                        T_weight: float, n: int | None = None, k_range: int | None = None,
                        method: str = "poisson") -> CorrelationResult:
    """Monte Carlo average of the wrapped weighted sum (all index tuples, n <= 2).

    ``method="poisson"`` sums each periodic family in closed form, which is
    exact when the total weight support sum(Delta_j)/T is below 1 (then only
    the zero frequency survives Poisson summation).  ``method="direct"`` sums
    over explicitly wrapped angles out to ``k_range`` periods.
    """
    n = phi.n if n is None else n
    if n != phi.n or len(weights) != n:
        raise ConfigError("arity mismatch between n, phi and weights")
    if n > 2:
        raise SizeError("wrapped Monte Carlo implemented for n <= 2")
    angles = _as_batch(samples)
    count, N_s = angles.shape
    if N_s != N:
        raise ConfigError(f"samples have N={N_s}, expected {N}")
    params = {"n": n, "N": N, "T": T_weight, "statistic": "wrapped", "method": method}
    support = sum(w.delta for w in weights) / T_weight
    if method == "poisson" and support >= 1.0:
        raise ConfigError(f"Poisson reduction needs sum(Delta)/T < 1 (got {support:g}); "
                          "use method='direct'")
    if method not in ("poisson", "direct"):
        raise ValueError("method must be 'poisson' or 'direct'")
    phi0 = phi.c * np.exp(-1.0)

    if n == 1:
        if method == "poisson":
            stats = np.full(count, phi0 * N * T_weight * float(g_eval(weights[0], 0.0)))
        else:
            kr = default_k_range(weights, T_weight) if k_range is None else k_range
            shifts = TWO_PI * np.arange(-kr, kr + 1)
            stats = np.array([phi0 * np.sum(h_eval(weights[0], (a[None, :] + shifts[:, None]) / T_weight))
                              for a in angles])
            params["k_range"] = kr
        return _mc_result(stats, params)

    w1, w2 = weights
    U = _pair_window(phi, N)
    band = N * phi.s + (w1.delta + w2.delta) / T_weight
    du = 0.01 / band
    stats = np.empty(count)
    if method == "poisson":
        table, u0, du = _table(lambda u: pair_profile(phi, N * u / TWO_PI)
                               * weight_autocorrelation(w1, w2, T_weight, u), U, du)
        mmax = int(math.ceil(U / TWO_PI)) + 1
        shifts = TWO_PI * np.arange(-mmax, mmax + 1)
        ones = np.ones(N)
        wy = np.ones(N * shifts.size)
        for i, a in enumerate(angles):
            y = np.sort((a[None, :] + shifts[:, None]).ravel())
            stats[i] = table_pair_sum(a, ones, y, wy, table, u0, du, U) / TWO_PI
    else:
        kr = default_k_range(weights, T_weight) if k_range is None else k_range
        table, u0, du = _table(lambda u: pair_profile(phi, N * u / TWO_PI), U, du)
        shifts = TWO_PI * np.arange(-kr, kr + 1)
        for i, a in enumerate(angles):
            x = (a[None, :] + shifts[:, None]).ravel()  # already sorted: a sorted, shifts > 2pi apart
            stats[i] = table_pair_sum(x, h_eval(w1, x / T_weight), x, h_eval(w2, x / T_weight),
                                      table, u0, du, U)
        params["k_range"] = kr
    return _mc_result(stats, params)
