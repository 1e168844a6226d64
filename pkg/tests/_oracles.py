"""Closed-form reference distributions shared by several test modules."""

import numpy as np
from scipy import stats

TWO_PI = 2.0 * np.pi


def pair_bin_probabilities(bins: int) -> np.ndarray:
    """P(theta_1 in bin i, theta_2 in bin j) for the sorted eigenangles of a
    Haar U(2), from the density (2 - 2 cos(a - b)) / (8 pi^2) on the square.

    cos(a - b) = cos a cos b + sin a sin b integrates separably over a box;
    the sorted pair doubles the off-diagonal mass and keeps half of the
    symmetric diagonal boxes.
    """
    edges = np.linspace(0.0, TWO_PI, bins + 1)
    w = np.diff(edges)
    int_cos = np.diff(np.sin(edges))
    int_sin = -np.diff(np.cos(edges))
    full = (2.0 * np.outer(w, w) - 2.0 * (np.outer(int_cos, int_cos) + np.outer(int_sin, int_sin)))
    full /= 8.0 * np.pi**2
    return np.triu(2.0 * full, 1) + np.diag(np.diag(full))


def pair_chi2(angles: np.ndarray, bins: int = 20):
    """Chi-square goodness of fit of sorted U(2) angle pairs; returns (stat, p)."""
    counts, _, _ = np.histogram2d(angles[:, 0], angles[:, 1], bins=bins,
                                  range=[[0, TWO_PI], [0, TWO_PI]])
    probs = pair_bin_probabilities(bins)
    keep = np.triu(np.ones((bins, bins), dtype=bool))
    assert counts[~keep].sum() == 0, "angles are not sorted"
    expected = probs[keep] * angles.shape[0]
    return stats.chisquare(counts[keep], expected)


def uniform_ks(angles: np.ndarray):
    return stats.kstest(angles / TWO_PI, "uniform")
