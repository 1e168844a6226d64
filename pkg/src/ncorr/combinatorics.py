"""Lazy enumerators for the index structures used by the correlation formulas.

Indices are 0-based throughout.  Each enumerator is a generator, so the
outer partition sums never materialise more than one structure at a time.
"""

from __future__ import annotations

import itertools
from typing import Iterator, NamedTuple, Sequence, Sized

from .errors import SizeError

MAX_N = 8

__all__ = [
    "Partition3",
    "PairPartition",
    "PairSystem",
    "enum_partition3",
    "enum_subset_pairs",
    "enum_pair_partitions",
    "enum_pair_systems",
    "enum_permutations",
    "count_partial_matchings",
]


class Partition3(NamedTuple):
    """Ordered set partition (K, L, M) of range(n); any part may be empty."""

    K: tuple[int, ...]
    L: tuple[int, ...]
    M: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.K) + len(self.L) + len(self.M)


class PairPartition(NamedTuple):
    """A partial matching between an A-side and a B-side index set.

    ``single_a``/``single_b`` hold the unmatched indices of each side and
    ``pairs`` the matched (a, b) couples.
    """

    single_a: tuple[int, ...]
    single_b: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]


class PairSystem(NamedTuple):
    """r disjoint pairs (i, j) with i < j, listed in increasing order of i."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def r(self) -> int:
        return len(self.pairs)


def _guard(n: int, name: str = "n") -> None:
    if not 0 <= n <= MAX_N:
        raise SizeError(f"{name}={n} outside the supported range 0..{MAX_N}")


def _size(x: int | Sized) -> int:
    return x if isinstance(x, int) else len(x)


def enum_partition3(n: int, require_equal_KL: bool = False) -> Iterator[Partition3]:
    """All 3**n ordered partitions (K, L, M) of range(n).

    With ``require_equal_KL`` only those with |K| == |L| are produced.
    """
    if n < 1:
        raise SizeError(f"n={n} must be at least 1")
    _guard(n)
    for labels in itertools.product(range(3), repeat=n):
        K = tuple(i for i, c in enumerate(labels) if c == 0)
        L = tuple(i for i, c in enumerate(labels) if c == 1)
        if require_equal_KL and len(K) != len(L):
            continue
        M = tuple(i for i, c in enumerate(labels) if c == 2)
        yield Partition3(K, L, M)


def enum_subset_pairs(
    A: int | Sized, B: int | Sized, max_size: int | None = None
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Index pairs (S, T), S within A and T within B, with |S| == |T|.

    ``max_size`` truncates to |S| < max_size; ``None`` keeps every size up to
    min(|A|, |B|).
    """
    na, nb = _size(A), _size(B)
    if max_size is not None and max_size < 0:
        raise ValueError("max_size must be non-negative")
    top = min(na, nb)
    if max_size is not None:
        top = min(top, max_size - 1)
    for k in range(top + 1):
        for S in itertools.combinations(range(na), k):
            for T in itertools.combinations(range(nb), k):
                yield S, T


def enum_pair_partitions(a_rest: int | Sized, b_rest: int | Sized) -> Iterator[PairPartition]:
    """Partitions of a_rest + b_rest into singletons and cross doubletons.

    Same-side doubletons carry a zero weight and are never generated.
    """
    na, nb = _size(a_rest), _size(b_rest)
    for k in range(min(na, nb) + 1):
        for a_sel in itertools.combinations(range(na), k):
            a_left = tuple(i for i in range(na) if i not in a_sel)
            for b_sel in itertools.permutations(range(nb), k):
                b_left = tuple(j for j in range(nb) if j not in b_sel)
                yield PairPartition(a_left, b_left, tuple(zip(a_sel, b_sel)))


def count_partial_matchings(na: int, nb: int) -> int:
    """Closed-form count sum_k C(na,k) C(nb,k) k! of :func:`enum_pair_partitions`."""
    from math import comb, factorial

    return sum(comb(na, k) * comb(nb, k) * factorial(k) for k in range(min(na, nb) + 1))


def _perfect_matchings(items: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for tail in _perfect_matchings(remaining):
            yield ((first, partner),) + tail


def enum_pair_systems(n: int) -> Iterator[PairSystem]:
    """Every collection of r >= 1 disjoint pairs i < j drawn from range(n)."""
    _guard(n)
    for r in range(1, n // 2 + 1):
        for chosen in itertools.combinations(range(n), 2 * r):
            for matching in _perfect_matchings(chosen):
                yield PairSystem(matching)


def enum_permutations(k: int) -> Iterator[tuple[int, ...]]:
    """All k! permutations of range(k); k = 0 yields the empty permutation."""
    _guard(k, "k")
    yield from itertools.permutations(range(k))


def subset(values: Sequence, idx: Sequence[int]) -> list:
    """Pick ``values[i]`` for ``i`` in ``idx``."""
    return [values[i] for i in idx]


def complement(n: int, idx: Sequence[int]) -> tuple[int, ...]:
    """Indices of range(n) not in ``idx``, in increasing order."""
    taken = set(idx)
    return tuple(i for i in range(n) if i not in taken)
