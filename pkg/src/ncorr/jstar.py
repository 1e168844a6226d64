"""The J*(A; B) combinatorial sum, its truncations J_q*, and the q = 1 permanent.

Shift sets are Python sequences whose elements are complex scalars or
broadcast-compatible numpy arrays; the contour module relies on the latter to
evaluate J* on a whole quadrature lattice with one combinatorial pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import cmath
from math import comb
from typing import Sequence

import numpy as np

from .combinatorics import (
    complement,
    count_partial_matchings,
    enum_pair_partitions,
    enum_permutations,
    enum_subset_pairs,
)
from .errors import PoleError, SizeError
from .special_functions import POLE_TOL, logz_deriv, logz_deriv2, z_eval, z_product

MAX_TOTAL = 16

__all__ = [
    "JStarInput",
    "h_factor",
    "d_term",
    "jstar",
    "jstar_q1_closed_form",
    "count_d_terms",
    "WorkedExampleReport",
    "verify_worked_examples",
]


class _CompensatedSum:
    """Neumaier summation that also works elementwise on arrays."""

    def __init__(self):
        self.total = 0j
        self.comp = 0j

    def add(self, x):
        t = self.total + x
        if isinstance(t, complex):
            if abs(self.total) >= abs(x):
                self.comp += (self.total - t) + x
            else:
                self.comp += (x - t) + self.total
            self.total = t
            return
        big = np.abs(self.total) >= np.abs(x)
        self.comp = self.comp + np.where(big, (self.total - t) + x, (x - t) + self.total)
        self.total = t

    @property
    def value(self):
        out = self.total + self.comp
        if isinstance(out, np.ndarray) and out.ndim == 0:
            return out[()]
        return out


@dataclass(frozen=True)
class JStarInput:
    """Arguments of J*: shift sets A and B, matrix size N, truncation level q.

    ``q=None`` means the full sum.  Construction validates that shifts within
    each set are pairwise distinct (the Z-dagger denominators need it).
    """

    A: tuple
    B: tuple
    N: int
    q: int | None = None
    distinct_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "B", tuple(self.B))
        if len(self.A) + len(self.B) > MAX_TOTAL:
            raise SizeError(f"|A|+|B| = {len(self.A) + len(self.B)} exceeds {MAX_TOTAL}")
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be a positive integer or None")
        for name, xs in (("A", self.A), ("B", self.B)):
            for i in range(len(xs)):
                for j in range(i):
                    gap = np.asarray(xs[i], dtype=complex) - np.asarray(xs[j], dtype=complex)
                    gap = gap - 2j * np.pi * np.round(gap.imag / (2 * np.pi))
                    if np.any(np.abs(gap) < self.distinct_tol):
                        raise PoleError(f"shifts {j} and {i} of {name} coincide")


def h_factor(S: Sequence, T: Sequence, cell: tuple, pole_tol: float = POLE_TOL):
    """H_{S,T} of one block of a singleton/doubleton partition.

    ``cell`` is ``(alpha, None)`` for an A-side singleton, ``(None, beta)`` for
    a B-side singleton and ``(alpha, beta)`` for a cross doubleton.
    """
    alpha, beta = cell
    if alpha is not None and beta is not None:
        return logz_deriv2(alpha + beta, pole_tol)
    if alpha is not None:
        own, other, x = S, T, alpha
    elif beta is not None:
        own, other, x = T, S, beta
    else:
        raise ValueError("cell must contain at least one shift")
    out = 0j
    for y in own:
        out = out + logz_deriv(x - y, pole_tol)
    for y in other:
        out = out - logz_deriv(x + y, pole_tol)
    return out


def _prefactor(S, T, N, pole_tol):
    Sm = [-s for s in S]
    Tm = [-t for t in T]
    expo = 0j
    for v in list(S) + list(T):
        expo = expo + v
    num = z_product(S, T, False, pole_tol) * z_product(Sm, Tm, False, pole_tol)
    den = z_product(S, Sm, True, pole_tol) * z_product(T, Tm, True, pole_tol)
    growth = cmath.exp(-N * expo) if isinstance(expo, complex) else np.exp(-N * expo)
    return growth * num / den


def d_term(S: Sequence, T: Sequence, a_rest: Sequence, b_rest: Sequence, N: int,
           pole_tol: float = POLE_TOL):
    """One summand D_{S,T}(A - S, B - T) of J*.

    The exponential/Z prefactor times the sum, over partial matchings of
    ``a_rest`` with ``b_rest``, of the product of H factors.
    """
    pref = _prefactor(S, T, N, pole_tol)
    if not a_rest and not b_rest:
        return pref
    ha = [h_factor(S, T, (a, None), pole_tol) for a in a_rest]
    hb = [h_factor(S, T, (None, b), pole_tol) for b in b_rest]
    hab = {}
    acc = _CompensatedSum()
    for part in enum_pair_partitions(a_rest, b_rest):
        prod = 1.0 + 0j
        for i in part.single_a:
            prod = prod * ha[i]
        for j in part.single_b:
            prod = prod * hb[j]
        for i, j in part.pairs:
            if (i, j) not in hab:
                hab[(i, j)] = logz_deriv2(a_rest[i] + b_rest[j], pole_tol)
            prod = prod * hab[(i, j)]
        acc.add(prod)
    return pref * acc.value


def jstar(A: Sequence, B: Sequence, N: int, q: int | None = None, *,
          only_size: int | None = None, pole_tol: float = POLE_TOL, validate: bool = True):
    """J*(A; B) or, with ``q``, the truncation J_q* keeping |S| = |T| < q.

    ``only_size`` restricts the sum to the single stratum |S| = |T| = only_size.
    """
    if validate:
        inp = JStarInput(A, B, N, q)
        A, B = inp.A, inp.B
    elif len(A) + len(B) > MAX_TOTAL:
        raise SizeError(f"|A|+|B| = {len(A) + len(B)} exceeds {MAX_TOTAL}")
    acc = _CompensatedSum()
    for S_idx, T_idx in enum_subset_pairs(A, B, q):
        if only_size is not None and len(S_idx) != only_size:
            continue
        S = [A[i] for i in S_idx]
        T = [B[j] for j in T_idx]
        a_rest = [A[i] for i in complement(len(A), S_idx)]
        b_rest = [B[j] for j in complement(len(B), T_idx)]
        acc.add(d_term(S, T, a_rest, b_rest, N, pole_tol))
    return acc.value


def jstar_q1_closed_form(A: Sequence, B: Sequence, pole_tol: float = POLE_TOL):
    """sum_sigma prod_k (z'/z)'(alpha_k + beta_sigma(k)); zero unless |A| == |B|."""
    if len(A) != len(B):
        return np.complex128(0.0)
    k = len(A)
    mat = [[logz_deriv2(a + b, pole_tol) for b in B] for a in A]
    acc = _CompensatedSum()
    for sigma in enum_permutations(k):
        prod = 1.0 + 0j
        for i, j in enumerate(sigma):
            prod = prod * mat[i][j]
        acc.add(prod)
    return acc.value


def count_d_terms(na: int, nb: int, q: int | None = None) -> int:
    """Number of (S, T, matching) triples visited by :func:`jstar`."""
    top = min(na, nb) if q is None else min(na, nb, q - 1)
    return sum(comb(na, k) * comb(nb, k) * count_partial_matchings(na - k, nb - k)
               for k in range(top + 1))


# --------------------------------------------------------------------------
# Worked-example regression: independent hand-written closed forms.

def _pair_pref(a, b, N):
    return np.exp(-N * (a + b)) * z_eval(a + b) * z_eval(-a - b)


def _lz(x):
    return logz_deriv(x)


def _lz2(x):
    return logz_deriv2(x)


def _ref_j_1_1(a, b, N):
    return _pair_pref(a, b, N) + _lz2(a + b)


def _ref_j_1_2(a, b1, b2, N):
    return (_pair_pref(a, b1, N) * (_lz(b2 - b1) - _lz(b2 + a))
            + _pair_pref(a, b2, N) * (_lz(b1 - b2) - _lz(b1 + a)))


def _ref_j_1_3(a, b1, b2, b3, N):
    bs = (b1, b2, b3)
    total = 0.0
    for i in range(3):
        bi = bs[i]
        others = [bs[j] for j in range(3) if j != i]
        term = _pair_pref(a, bi, N)
        for bj in others:
            term = term * (_lz(bj - bi) - _lz(bj + a))
        total = total + term
    return total


def _ref_d_2_2(a1, a2, b1, b2, N):
    """The six D terms of J*({a1,a2},{b1,b2}) keyed by (S, T) index tuples."""
    def single(ai, aj, bi, bj):
        # D_{{ai},{bi}}({aj},{bj})
        return _pair_pref(ai, bi, N) * (
            _lz2(aj + bj) + (_lz(aj - ai) - _lz(aj + bi)) * (_lz(bj - bi) - _lz(bj + ai)))

    full = (np.exp(-N * (a1 + a2 + b1 + b2))
            * z_eval(a1 + b1) * z_eval(-a1 - b1) * z_eval(a1 + b2) * z_eval(-a1 - b2)
            * z_eval(a2 + b1) * z_eval(-a2 - b1) * z_eval(a2 + b2) * z_eval(-a2 - b2)
            / (z_eval(a1 - a2) * z_eval(a2 - a1) * z_eval(b1 - b2) * z_eval(b2 - b1)))
    return {
        ((), ()): _lz2(a1 + b1) * _lz2(a2 + b2) + _lz2(a1 + b2) * _lz2(a2 + b1),
        ((0,), (0,)): single(a1, a2, b1, b2),
        ((0,), (1,)): single(a1, a2, b2, b1),
        ((1,), (0,)): single(a2, a1, b1, b2),
        ((1,), (1,)): single(a2, a1, b2, b1),
        ((0, 1), (0, 1)): full,
    }


@dataclass
class WorkedExampleReport:
    """Outcome of :func:`verify_worked_examples`."""

    N: int
    trials: int
    tol: float
    max_deviation: dict = field(default_factory=dict)

    @property
    def worst(self) -> float:
        return max(self.max_deviation.values()) if self.max_deviation else 0.0

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def lines(self) -> list[str]:
        out = [f"{name:<28s} max dev {dev:.3e}" for name, dev in self.max_deviation.items()]
        out.append(f"{'overall':<28s} {'PASS' if self.passed else 'FAIL'} (tol {self.tol:g})")
        return out


def _random_shifts(rng, k, min_gap=0.05):
    while True:
        re = rng.uniform(0.1, 1.0, k)
        im = rng.uniform(-3.0, 3.0, k)
        xs = re + 1j * im
        ok = True
        for i in range(k):
            for j in range(i):
                d = xs[i] - xs[j]
                if abs(d - 2j * np.pi * np.round(d.imag / (2 * np.pi))) < min_gap:
                    ok = False
        if ok:
            return [complex(x) for x in xs]


def _rel(x, ref):
    x, ref = complex(x), complex(ref)
    scale = abs(ref)
    if scale < 1e-300:
        return abs(x)
    return abs(x - ref) / scale


def verify_worked_examples(N: int, trials: int = 100, tol: float = 1e-10,
                           seed: int = 0) -> WorkedExampleReport:
    """Compare the engine with independently written small-case formulas."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    rep = WorkedExampleReport(N=N, trials=trials, tol=tol)
    dev = rep.max_deviation

    def note(name, x, ref, absolute=False):
        d = abs(complex(x)) if absolute else _rel(x, ref)
        dev[name] = max(dev.get(name, 0.0), d)

    for _ in range(trials):
        a = _random_shifts(rng, 1)
        b = _random_shifts(rng, 3)
        aa = _random_shifts(rng, 2)
        bb = _random_shifts(rng, 2)

        note("J*(1,1)", jstar(a, b[:1], N), _ref_j_1_1(a[0], b[0], N))
        note("J_1(1,1)", jstar(a, b[:1], N, q=1), _lz2(a[0] + b[0]))
        note("J_2(1,1)", jstar(a, b[:1], N, q=2), _ref_j_1_1(a[0], b[0], N))
        note("D_00(1,2) = 0", d_term([], [], a, b[:2], N), 0.0, absolute=True)
        note("J_1(1,2) = 0", jstar(a, b[:2], N, q=1), 0.0, absolute=True)
        note("J*(1,2)", jstar(a, b[:2], N), _ref_j_1_2(a[0], b[0], b[1], N))
        note("J*(1,3)", jstar(a, b, N), _ref_j_1_3(a[0], b[0], b[1], b[2], N))

        refs = _ref_d_2_2(aa[0], aa[1], bb[0], bb[1], N)
        for (S_idx, T_idx), ref in refs.items():
            S = [aa[i] for i in S_idx]
            T = [bb[j] for j in T_idx]
            a_rest = [aa[i] for i in complement(2, S_idx)]
            b_rest = [bb[j] for j in complement(2, T_idx)]
            note(f"D_{S_idx},{T_idx}(2,2)", d_term(S, T, a_rest, b_rest, N), ref)
        total = sum(refs.values())
        note("J*(2,2)", jstar(aa, bb, N), total)
        note("J_2(2,2)", jstar(aa, bb, N, q=2), total - refs[((0, 1), (0, 1))])
        note("J_1(2,2)", jstar(aa, bb, N, q=1), refs[((), ())])
    return rep
