"""Closed-form main terms of the weighted n-correlation.

``rs_main`` sums, over partitions (K, L, M) with |K| = |L| and permutations
sigma, the orthant integrals

    int_{xi_k > 0} xi_{k_1} ... xi_{k_|K|} Phi(sum_j xi_{k_j} (e_{k_j} - e_{l_sigma(j)})) dxi,

scaled by kappa(h) N T / 2 pi.  ``rs_sarnak_form`` sums instead over systems of
disjoint pairs i < j with |v|-weighted integrals over all of R^r; for even Phi
the two agree term by term.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combinatorics import enum_pair_systems, enum_partition3, enum_permutations
from .errors import ConfigError
from .test_functions import PhiSpec, WeightSpec, _leggauss, kappa, phi_eval, psi

__all__ = [
    "rs_integral",
    "rs_main",
    "rs_sarnak_form",
    "pair_system_integral",
    "asymptotic_I",
    "term_prefactor",
]


def _first_moment(phi: PhiSpec, nodes: int = 128) -> float:
    """int_0^s xi psi(xi/s)^2 dxi by Gauss-Legendre on [0, s]."""
    x, w = _leggauss(nodes)
    u = 0.5 * (x + 1.0)
    return float(phi.s**2 * np.sum(0.5 * w * u * psi(u) ** 2))


def _orthant_nodes(s: float, dim: int, nodes: int):
    x, w = _leggauss(nodes)
    u = 0.5 * s * (x + 1.0)
    wu = 0.5 * s * w
    grids = np.meshgrid(*([u] * dim), indexing="ij")
    weights = np.ones_like(grids[0]) if dim else np.ones(())
    for ax in range(dim):
        shape = [1] * dim
        shape[ax] = nodes
        weights = weights * wu.reshape(shape)
    return grids, weights


def rs_integral(K: Sequence[int], L: Sequence[int], sigma: Sequence[int], phi: PhiSpec,
                method: str = "separable", nodes: int = 64) -> float:
    """Orthant integral for one (K, L, sigma) term.

    ``method="separable"`` uses the product structure of Phi:
    c * psi(0)^{|M|} * (int_0^s xi psi(xi/s)^2 dxi)^{|K|};
    ``method="direct"`` integrates Phi itself over (0, s)^{|K|} by tensor
    Gauss-Legendre, without using separability.
    """
    K, L, sigma = tuple(K), tuple(L), tuple(sigma)
    if len(K) != len(L) or len(sigma) != len(K):
        raise ConfigError("K, L and sigma must have equal length")
    if set(K) & set(L):
        raise ConfigError("K and L must be disjoint")
    k = len(K)
    if 2 * k > phi.n:
        raise ConfigError("|K| = |L| must not exceed n/2")
    m = phi.n - 2 * k
    if method == "separable":
        return float(phi.c * psi(0.0) ** m * _first_moment(phi) ** k)
    if method != "direct":
        raise ValueError("method must be 'separable' or 'direct'")
    if k == 0:
        return float(phi_eval(phi, np.zeros(phi.n)))
    grids, weights = _orthant_nodes(phi.s, k, nodes)
    arg = np.zeros(grids[0].shape + (phi.n,))
    weight = weights.copy()
    for j in range(k):
        arg[..., K[j]] += grids[j]
        arg[..., L[sigma[j]]] -= grids[j]
        weight = weight * grids[j]
    return float(np.sum(weight * phi_eval(phi, arg)))


def _main_sum(n: int, phi: PhiSpec, method: str) -> float:
    total = 0.0
    for part in enum_partition3(n, require_equal_KL=True):
        for sigma in enum_permutations(len(part.K)):
            total += rs_integral(part.K, part.L, sigma, phi, method)
    return total


def rs_main(n: int, N: int, T_weight: float, phi: PhiSpec, weights: Sequence[WeightSpec],
            method: str = "separable") -> float:
    """kappa(h) (N T / 2 pi) * sum_{K,L,M; |K|=|L|} sum_sigma rs_integral."""
    if phi.n != n or len(weights) != n:
        raise ConfigError("arity mismatch between n, phi and weights")
    return float(kappa(weights) * N * T_weight / (2.0 * np.pi) * _main_sum(n, phi, method))


def pair_system_integral(pairs: Sequence[tuple[int, int]], phi: PhiSpec,
                         nodes: int = 64) -> float:
    """int_{R^r} |v_1| ... |v_r| Phi(sum_t v_t (e_{i(t)} - e_{j(t)})) dv.

    R^r is split into its 2^r orthants (|v| has a kink at 0); each is a
    Gauss-Legendre tensor integral over (0, s)^r.
    """
    r = len(pairs)
    if r == 0:
        return float(phi_eval(phi, np.zeros(phi.n)))
    grids, weights = _orthant_nodes(phi.s, r, nodes)
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=r):
        arg = np.zeros(grids[0].shape + (phi.n,))
        weight = weights.copy()
        for t, (i, j) in enumerate(pairs):
            v = signs[t] * grids[t]
            arg[..., i] += v
            arg[..., j] -= v
            weight = weight * grids[t]
        total += float(np.sum(weight * phi_eval(phi, arg)))
    return total


def rs_sarnak_form(n: int, phi: PhiSpec, weights: Sequence[WeightSpec], N: int | None = None,
                   T_weight: float = 1.0, logscale: float | None = None) -> float:
    """kappa(h) (T * logscale / 2 pi) [Phi(0) + sum over pair systems].

    ``logscale`` defaults to N (on the zeta side it is log T).
    """
    if phi.n != n or len(weights) != n:
        raise ConfigError("arity mismatch between n, phi and weights")
    if logscale is None:
        if N is None:
            raise ConfigError("give N or logscale")
        logscale = float(N)
    total = pair_system_integral((), phi)
    for system in enum_pair_systems(n):
        total += pair_system_integral(system.pairs, phi)
    return float(kappa(weights) * T_weight * logscale / (2.0 * np.pi) * total)


def asymptotic_I(K: Sequence[int], L: Sequence[int], sigma: Sequence[int], phi: PhiSpec,
                 weights: Sequence[WeightSpec], N: int, T_weight: float) -> complex:
    """Leading large-T behaviour of the contour integral I(K, L, sigma):

    (N T) N^{2|K| - n} (2 pi i)^n (-1)^{n - |K|} (kappa/2pi) * rs_integral.
    """
    n = phi.n
    k = len(K)
    val = rs_integral(K, L, sigma, phi)
    pref = (N * T_weight) * float(N) ** (2 * k - n) * (2j * np.pi) ** n * (-1) ** (n - k)
    return complex(pref * kappa(weights) / (2.0 * np.pi) * val)


def term_prefactor(n: int, k: int) -> tuple[int, Fraction]:
    """Sign and power of N left after combining the contour prefactor
    (-1)^{|L|+|M|} N^{|M|} / (2 pi i)^n with the asymptotic of I(K, L, sigma)
    for |K| = |L| = k, |M| = n - 2k.  The (2 pi i) powers cancel identically;
    the returned pair should always be (1, 0) (i.e. the bare kappa N T / 2pi).
    """
    if not 0 <= 2 * k <= n:
        raise ValueError("need 0 <= 2k <= n")
    m = n - 2 * k
    sign = (-1) ** ((k + m) + (n - k))
    power = Fraction(m) + Fraction(2 * k - n)
    return sign, power
