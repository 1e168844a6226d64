import itertools
import warnings

import numpy as np
import pytest
from scipy import integrate

from ncorr.combinatorics import enum_partition3, enum_permutations
from ncorr.contour import BigF, contour_term_q1
from ncorr.errors import ConfigError
from ncorr.rs_main import (
    asymptotic_I,
    pair_system_integral,
    rs_integral,
    rs_main,
    rs_sarnak_form,
    term_prefactor,
)
from ncorr.test_functions import PhiSpec, WeightSpec, kappa, phi_eval

W = WeightSpec(1.0)


def orthant_pair_moment(phi):
    """int_0^s xi Phi(xi, -xi) dxi for n = 2 by adaptive quadrature."""
    return integrate.quad(lambda x: x * float(phi_eval(phi, [x, -x])), 0, phi.s,
                          epsabs=1e-15, epsrel=1e-13, limit=200)[0]


def test_single_point_main_term():
    phi = PhiSpec(1, c=2.0)
    expected = kappa([W]) * 7 * 3.0 / (2 * np.pi) * 2.0 * np.exp(-1)
    assert rs_main(1, 7, 3.0, phi, [W]) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("s", [0.3, 0.9])
def test_pair_main_term_formula(s):
    phi = PhiSpec(2, q=1, eps=2 - 2 * s, s=s)
    expected = kappa([W, W]) * 20 * 5.0 / (2 * np.pi) * (
        float(phi_eval(phi, [0.0, 0.0])) + 2 * orthant_pair_moment(phi))
    assert rs_main(2, 20, 5.0, phi, [W, W]) == pytest.approx(expected, rel=1e-11)


def test_empty_orthant_is_phi_at_origin():
    phi = PhiSpec(3, c=1.3)
    assert rs_integral((), (), (), phi) == pytest.approx(1.3 * np.exp(-3))
    assert rs_integral((), (), (), phi, method="direct") == pytest.approx(1.3 * np.exp(-3))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_separable_and_direct_routes_agree(n):
    phi = PhiSpec(n, q=2, eps=0.3)
    for part in enum_partition3(n, require_equal_KL=True):
        for sigma in enum_permutations(len(part.K)):
            a = rs_integral(part.K, part.L, sigma, phi, "separable")
            b = rs_integral(part.K, part.L, sigma, phi, "direct")
            assert a >= 0
            assert a == pytest.approx(b, rel=1e-8)


def test_main_term_linear_in_T():
    phi = PhiSpec(3)
    a = rs_main(3, 10, 2.0, phi, [W] * 3)
    assert rs_main(3, 10, 4.0, phi, [W] * 3) == 2 * a


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("s_frac", [0.4, 1.0])
def test_main_term_equals_pair_system_form(n, s_frac):
    phi = PhiSpec(n, q=1, eps=0.2, s=s_frac * 1.8 / n)
    ws = [WeightSpec(d) for d in np.linspace(0.8, 1.2, n)]
    a = rs_main(n, 15, 2.0, phi, ws)
    b = rs_sarnak_form(n, phi, ws, N=15, T_weight=2.0)
    assert a == pytest.approx(b, rel=1e-10)


def test_pair_system_integral_single_pair():
    phi = PhiSpec(2)
    assert pair_system_integral([(0, 1)], phi) == pytest.approx(2 * orthant_pair_moment(phi), rel=1e-11)


def test_relabeling_invariance():
    phi = PhiSpec(4, q=2, eps=0.3)
    ref = rs_integral((0,), (1,), (0,), phi, "direct")
    for k, l in itertools.permutations(range(4), 2):
        assert rs_integral((k,), (l,), (0,), phi, "direct") == pytest.approx(ref, rel=1e-12)


def test_logscale_overrides_N():
    phi = PhiSpec(2)
    assert rs_sarnak_form(2, phi, [W, W], logscale=7.0) == pytest.approx(
        rs_sarnak_form(2, phi, [W, W], N=7))
    with pytest.raises(ConfigError):
        rs_sarnak_form(2, phi, [W, W])


@pytest.mark.parametrize("n", range(1, 9))
def test_prefactor_bookkeeping(n):
    for k in range(n // 2 + 1):
        assert term_prefactor(n, k) == (1, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_asymptotic_terms_sum_to_main_term(n):
    phi, ws, N, T = PhiSpec(n, q=2, eps=0.3), [W] * n, 12, 3.0
    total = 0j
    for part in enum_partition3(n, require_equal_KL=True):
        for sigma in enum_permutations(len(part.K)):
            pref = (-1) ** (len(part.L) + len(part.M)) * N ** len(part.M) / (2j * np.pi) ** n
            total += pref * asymptotic_I(part.K, part.L, sigma, phi, ws, N, T)
    main = rs_main(n, N, T, phi, ws)
    assert abs(total.imag) < 1e-13 * main
    assert total.real == pytest.approx(main, rel=1e-13)


def _asymptotic_gap(N, T):
    phi = PhiSpec(2)
    F = BigF(phi, [W, W], N, T)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        val = contour_term_q1(F, (0,), (1,), (0,))
    asym = asymptotic_I((0,), (1,), (0,), phi, [W, W], N, T)
    assert abs(val.imag) < 1e-8 * abs(val)
    return abs(val - asym) / abs(asym)


def test_asymptotic_gap_is_second_order_in_N():
    # the leading term misses the constant of (z'/z)'(z) = 1/z^2 - 1/12 + ...,
    # a relative N^-2 correction that does not depend on T
    g15, g30 = _asymptotic_gap(15, 50.0), _asymptotic_gap(30, 50.0)
    assert g30 < 1e-3
    assert g15 / g30 == pytest.approx(4.0, rel=0.01)
    assert _asymptotic_gap(30, 100.0) == pytest.approx(g30, rel=1e-3)


def test_arity_checks():
    with pytest.raises(ConfigError):
        rs_main(3, 10, 1.0, PhiSpec(2), [W, W])
    with pytest.raises(ConfigError):
        rs_integral((0,), (0,), (0,), PhiSpec(2))
    with pytest.raises(ConfigError):
        rs_integral((0, 1), (2, 3), (0, 1), PhiSpec(3))
