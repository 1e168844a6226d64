import math

import numpy as np
import pytest
from scipy import integrate

from ncorr.empirical import (
    TorusFunction,
    default_k_range,
    determinantal_value,
    kernel_determinant,
    mc_distinct_tuples,
    mc_wrapped_weighted,
    small_N_oracle,
    weight_autocorrelation,
    wrapped_determinantal_value,
)
from ncorr.errors import ConfigError, SizeError
from ncorr.rmt import sample_batch
from ncorr.test_functions import PhiSpec, WeightSpec, g_eval, kappa

W = WeightSpec(1.0)


def cos_difference(k):
    return TorusFunction(np.array([[k, -k]]), np.array([1.0]), np.array([0.0]))


def constant(n):
    return TorusFunction(np.zeros((1, n), dtype=int), np.array([1.0]), np.array([0.0]))


@pytest.mark.parametrize("N, n", [(2, 1), (3, 1), (2, 2), (3, 2), (3, 3)])
def test_constant_counts_ordered_tuples(N, n):
    expected = math.perm(N, n)
    assert determinantal_value(constant(n), N, n).value == pytest.approx(expected, rel=1e-12)
    assert small_N_oracle(constant(n), N, n).value == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 5])
def test_trace_moments(N, k):
    # sum_{i != j} cos k(theta_i - theta_j) = |Tr U^k|^2 - N, whose mean is min(k, N) - N
    assert determinantal_value(cos_difference(k), N, 2).value == pytest.approx(min(k, N) - N, abs=1e-12)


def test_single_angle_moments_vanish():
    F = TorusFunction(np.array([[1], [3]]), np.array([1.0, 0.5]), np.array([0.2, 1.0]))
    assert abs(determinantal_value(F, 3, 1).value) < 1e-13
    assert abs(small_N_oracle(F, 3, 1).value) < 1e-13


@pytest.mark.parametrize("N, n", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_weyl_oracle_matches_determinant(N, n):
    F = TorusFunction.random(n, degree=3, seed=10 * N + n)
    a = small_N_oracle(F, N, n).value
    # the integrand has degree <= 3 + 2(N - 1) per axis: 16 nodes are exact
    b = determinantal_value(F, N, n, nodes=16).value
    assert a == pytest.approx(b, rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("N, n", [(2, 2), (3, 2), (4, 2)])
def test_monte_carlo_matches_determinant(N, n):
    F = TorusFunction.random(n, degree=2, seed=N)
    mc = mc_distinct_tuples(sample_batch(N, 20_000, seed=N), F, n)
    exact = determinantal_value(F, N, n).value
    assert abs(mc.value - exact) < 4 * mc.error


def test_kernel_determinant_pair():
    rng = np.random.default_rng(0)
    th = rng.uniform(0, 2 * np.pi, (50, 2))
    N = 5
    d = th[:, 0] - th[:, 1]
    S = np.sin(N * d / 2) / np.sin(d / 2)
    np.testing.assert_allclose(kernel_determinant(th, N), N**2 - S**2, rtol=1e-10, atol=1e-10)


def test_size_errors():
    with pytest.raises(SizeError):
        mc_distinct_tuples(sample_batch(2, 4, seed=0), constant(3), 3)
    with pytest.raises(SizeError):
        mc_distinct_tuples(sample_batch(10, 100, seed=0), constant(3), 3, budget=1e3)


@pytest.mark.parametrize("u", [0.0, 3.0, 40.0])
@pytest.mark.parametrize("T", [1.0, 7.5])
def test_weight_autocorrelation_against_quadrature(u, T):
    re = integrate.quad(lambda t: g_eval(W, t) * g_eval(W, -t) * np.cos(u * t / T), -1, 1,
                        epsabs=1e-15, limit=200)[0]
    ref = 2 * np.pi * T * re
    assert weight_autocorrelation(W, W, T, np.array([u]))[0] == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_wrapped_single_point():
    phi = PhiSpec(1, c=1.5)
    N, T = 9, 4.0
    expected = N / (2 * np.pi) * 1.5 * np.exp(-1) * kappa([W]) * T
    assert wrapped_determinantal_value(phi, [W], N, T).value == pytest.approx(expected, rel=1e-12)


def test_poisson_path_requires_small_support():
    batch = sample_batch(4, 3, seed=0)
    with pytest.raises(ConfigError):
        mc_wrapped_weighted(batch, PhiSpec(2), [W, W], 4, 1.5)


def test_poisson_equals_direct_per_sample():
    batch = sample_batch(6, 2, seed=1)
    phi, T = PhiSpec(2), 3.0
    for i in range(len(batch)):
        a = mc_wrapped_weighted(batch[i], phi, [W, W], 6, T, method="poisson").value
        b = mc_wrapped_weighted(batch[i], phi, [W, W], 6, T, method="direct").value
        assert a == pytest.approx(b, rel=1e-10)


def test_direct_path_converged_in_k_range():
    batch = sample_batch(5, 3, seed=2)
    phi, T = PhiSpec(2), 1.0
    k = default_k_range([W, W], T)
    a = mc_wrapped_weighted(batch, phi, [W, W], 5, T, k_range=k, method="direct").value
    b = mc_wrapped_weighted(batch, phi, [W, W], 5, T, k_range=2 * k, method="direct").value
    assert abs(a - b) < 1e-10 * abs(a)


def test_direct_mc_matches_wrapped_determinant():
    # large total weight support: Poisson reduction unavailable, sum directly
    phi, N, T = PhiSpec(2), 8, 1.0
    exact = wrapped_determinantal_value(phi, [W, W], N, T).value
    mc = mc_wrapped_weighted(sample_batch(N, 3000, seed=4), phi, [W, W], N, T, method="direct")
    assert abs(mc.value - exact) < 4 * mc.error


def test_poisson_mc_matches_wrapped_determinant():
    phi, N, T = PhiSpec(2), 10, 20.0
    exact = wrapped_determinantal_value(phi, [W, W], N, T).value
    mc = mc_wrapped_weighted(sample_batch(N, 3000, seed=5), phi, [W, W], N, T)
    assert abs(mc.value - exact) < 4 * mc.error


def test_wrapped_determinant_step_converged():
    phi, N, T = PhiSpec(2), 12, 3.0
    res = wrapped_determinantal_value(phi, [W, W], N, T)
    finer = wrapped_determinantal_value(phi, [W, W], N, T, step=res.params["step"] / 3)
    assert res.value == pytest.approx(finer.value, rel=1e-12)
