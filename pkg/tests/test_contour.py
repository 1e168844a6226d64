import warnings

import numpy as np
import pytest
from scipy import integrate

from ncorr.contour import (
    BigF,
    ContourSpec,
    bigF_eval,
    contour_term_q1,
    correlation_contour,
    correlation_contour_q1,
    decay_probe,
)
from ncorr.empirical import wrapped_determinantal_value
from ncorr.errors import ConfigError
from ncorr.test_functions import PhiSpec, WeightSpec, f_eval, g_eval, h_eval, kappa, phi_eval

W = WeightSpec(1.0)


def make_F(n, N, T=1.0, q=1, eps=0.2, c=1.0):
    return BigF(PhiSpec(n, q=q, eps=eps, c=c), [W] * n, N, T)


@pytest.fixture(autouse=True)
def _quiet_small_N():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def test_bigF_at_origin():
    F = make_F(2, 10, T=3.0)
    expected = f_eval(F.phi, [0.0, 0.0]) * h_eval(W, 0.0) ** 2
    assert bigF_eval(F, [0.0, 0.0]) == pytest.approx(expected, rel=1e-13)


def test_single_point_closed_form():
    F = make_F(1, 8, T=2.5, c=1.7)
    expected = F.N / (2 * np.pi) * 1.7 * np.exp(-1) * kappa([W]) * 2.5
    assert correlation_contour(F).value == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("N, q", [(8, 1), (8, 2), (12, 1), (60, 1)])
def test_pair_contour_matches_determinant(N, q):
    F = make_F(2, N, q=q)
    det = wrapped_determinantal_value(F.phi, F.weights, N, F.T_weight).value
    res = correlation_contour(F)
    assert abs(res.value.imag) < 1e-10 * abs(det)
    assert res.value.real == pytest.approx(det, rel=1e-9)


def test_q1_entry_point_equals_q_equals_one():
    F = make_F(2, 10)
    a = correlation_contour_q1(F).value
    b = correlation_contour(F, q=1).value
    assert a == pytest.approx(b, rel=1e-9)


def test_truncation_is_exact_below_budget():
    F = make_F(2, 16)
    full = correlation_contour(F, q="full").value
    q1 = correlation_contour_q1(F).value
    assert q1 == pytest.approx(full, rel=1e-6)


def test_truncation_matters_above_budget():
    # support budget 1.8 * 2 > 2: the |S| = 1 stratum is no longer negligible
    F = make_F(2, 8, q=2)
    full = correlation_contour(F, q="full").value
    q1 = correlation_contour_q1(F).value
    assert abs(q1 - full) > 1e-3 * abs(full)


def test_decay_probe_squares_when_delta_doubles():
    F = make_F(2, 20)
    probe = decay_probe(F, [0.2, 0.4], S_size=1)
    s1, s2 = (r.suppression for r in probe.rows)
    assert s1 < 1e-2
    assert s2 == pytest.approx(s1 ** 2, rel=1e-3)
    assert probe.slope <= -0.9 * F.N * F.phi.eps


def test_decay_probe_base_stratum_is_flat():
    F = make_F(2, 20)
    probe = decay_probe(F, [0.2, 0.4, 0.6], S_size=0)
    assert all(r.suppression == pytest.approx(1.0) for r in probe.rows)


@pytest.mark.parametrize("N, T", [(10, 1.0), (20, 3.0)])
def test_pure_M_term_against_fourier_side(N, T):
    # with K = L = empty both variables run up the imaginary axis, and
    # int F(-t) dt = (2 pi T)^2 int Phi(xi, -xi) g(T N xi) g(-T N xi) dxi
    F = make_F(2, N, T=T)
    s = F.phi.s
    ref = integrate.quad(
        lambda xi: float(phi_eval(F.phi, [xi, -xi]) * g_eval(W, T * N * xi) * g_eval(W, -T * N * xi)),
        -s, s, points=[-1 / (T * N), 1 / (T * N)], epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    ref *= (2 * np.pi * T) ** 2
    val = contour_term_q1(F, (), (), ())
    assert abs(val.imag) < 1e-10 * abs(val)
    assert val.real == pytest.approx(-ref, rel=1e-8)


def test_n3_q1_matches_full_truncation():
    # large N s and a short weight scale keep the triple lattice small
    F = make_F(3, 40, T=0.25)
    spec = ContourSpec(error_estimate=False)
    a = correlation_contour_q1(F, spec).value
    b = correlation_contour(F, spec, q="full").value
    assert abs(a.imag) < 1e-9 * abs(a)
    assert a == pytest.approx(b, rel=1e-8)


def test_invalid_arguments():
    with pytest.raises(ConfigError):
        BigF(PhiSpec(2), [W], 10, 1.0)
    with pytest.raises(ConfigError):
        ContourSpec(delta=0)
    with pytest.raises(ConfigError):
        correlation_contour(make_F(2, 10), q=0)
    with pytest.raises(ConfigError):
        contour_term_q1(make_F(2, 10), (0,), (), ())
