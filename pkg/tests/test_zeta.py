import numpy as np
import pytest
from scipy import integrate

from ncorr.errors import ConfigError, OrderError, ParseError, SupportError
from ncorr.rs_main import rs_sarnak_form
from ncorr.test_functions import PhiSpec, WeightSpec
from ncorr.zeta import (
    FejerProfile,
    PairProfile,
    ZeroDataset,
    effective_logscale,
    load_zeros,
    montgomery_prediction,
    montgomery_statistic,
    unfold,
    zeta_n_correlation,
)

W = WeightSpec(1.0)


def write(tmp_path, text, name="z.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- ingest ---------------------------------------------------------------

def test_load_three_zeros(tmp_path):
    ds = load_zeros(write(tmp_path, "14.134725\n21.022040\n25.010858\n"))
    assert ds.count == 3
    assert ds.ordinates[0] == pytest.approx(14.134725)
    assert ds.max_height == pytest.approx(25.010858)


def test_comments_and_blank_lines(tmp_path):
    ds = load_zeros(write(tmp_path, "# header\n\n14.134725\n  21.022040  \n# x\n25.010858\n"))
    assert ds.count == 3


def test_unsorted_input_is_sorted(tmp_path):
    ds = load_zeros(write(tmp_path, "25.010858\n14.134725\n21.022040\n"))
    np.testing.assert_array_equal(ds.ordinates, [14.134725, 21.022040, 25.010858])


def test_load_is_idempotent(tmp_path, zeros_1000):
    text = "\n".join(f"{g:.9f}" for g in zeros_1000.ordinates[::-1])
    again = load_zeros(write(tmp_path, text))
    np.testing.assert_array_equal(again.ordinates, zeros_1000.ordinates)


@pytest.mark.parametrize("text, match", [
    ("", "no ordinates"),
    ("# only a comment\n", "no ordinates"),
    ("14.1\n21.0 22.0\n", ":2:"),
    ("14.1\nabc\n", ":2:"),
    ("14.1\n-3.0\n", ":2:"),
])
def test_parse_errors(tmp_path, text, match):
    with pytest.raises(ParseError, match=match):
        load_zeros(write(tmp_path, text))


def test_duplicates_name_both_lines(tmp_path):
    with pytest.raises(OrderError, match="lines 1 and 3"):
        load_zeros(write(tmp_path, "14.134725\n21.02204\n14.13472500000001\n"))


def test_dataset_validation():
    with pytest.raises(ParseError):
        ZeroDataset(np.array([14.1]))
    with pytest.raises(OrderError):
        ZeroDataset(np.array([14.1, 14.1]))
    ds = ZeroDataset(np.array([14.1, 21.0, 25.0]))
    assert ds.up_to(22.0).size == 2
    with pytest.raises(ConfigError):
        ds.up_to(30.0)


def test_unfolding_counts_zeros(zeros_1000):
    # the smooth count tracks the index up to the bounded fluctuation S(t)
    k = np.arange(1, zeros_1000.count + 1)
    dev = unfold(zeros_1000.ordinates) - k
    assert np.max(np.abs(dev + 0.5)) < 1.5
    assert abs(np.mean(dev) + 0.5) < 0.1


# -- Montgomery -------------------------------------------------------------

def test_fejer_fourier_pair():
    f = FejerProfile(0.8)
    for alpha in (0.0, 0.3, 0.79, 1.2):
        ref = 2 * integrate.quad(lambda u: f(u), 0, np.inf, weight="cos", wvar=2 * np.pi * alpha,
                                 limlst=200)[0] if alpha else \
            2 * integrate.quad(lambda u: f(u), 0, 400, limit=2000)[0] + 1 / (np.pi * 0.8) ** 2 / 400
        assert f.fourier(alpha) == pytest.approx(ref, abs=1e-6)


def test_prediction_closed_form_for_unit_triangle():
    # fhat = (1 - |alpha|)_+: 1 + 1 - int (1 - |alpha|)^2 = 4/3
    assert montgomery_prediction(FejerProfile(1.0)) == pytest.approx(4 / 3, rel=1e-13)


@pytest.mark.parametrize("s", [0.5, 0.9])
def test_prediction_against_direct_u_quadrature(s):
    prof = PairProfile(PhiSpec(2, q=1, eps=2 - 2 * s, s=s))
    U = prof.window
    body = integrate.quad(lambda u: prof(u) * (1 - np.sinc(u) ** 2), 0, U, limit=4000,
                          epsabs=1e-13)[0]
    ref = float(prof(0.0)) + 2 * body
    assert montgomery_prediction(prof) == pytest.approx(ref, rel=1e-8)


def test_support_outside_admissible_range():
    with pytest.raises(SupportError):
        montgomery_prediction(FejerProfile(1.2))
    with pytest.raises(SupportError):
        montgomery_prediction(PairProfile(PhiSpec(2, q=2, eps=0.2, s=1.1)))


def test_three_zeros_dominated_by_diagonal(tmp_path):
    ds = load_zeros(write(tmp_path, "14.134725\n21.022040\n25.010858\n"))
    res = montgomery_statistic(ds, FejerProfile(1.0))
    assert res.diagonal == pytest.approx(3.0)
    assert res.diagonal > 0.5 * res.pair_sum
    assert res.normaliser == pytest.approx(3.0)


def test_weighted_diagonal_is_separable(zeros_1000):
    T = 300.0
    res = montgomery_statistic(zeros_1000, FejerProfile(1.0), window="weighted",
                               weights=[W, W], T_weight=T)
    from ncorr.test_functions import h_eval
    h = h_eval(W, zeros_1000.ordinates / T)
    assert res.diagonal == pytest.approx(np.sum(h * h), rel=1e-12)


def test_montgomery_on_fixture(zeros_1000):
    res = montgomery_statistic(zeros_1000, FejerProfile(1.0))
    assert res.count == 1000
    assert res.relative_deviation < 0.05


def test_asymptotic_normalisation_is_reported(zeros_1000):
    res = montgomery_statistic(zeros_1000, FejerProfile(1.0), normalisation="asymptotic")
    assert res.normalisation == "asymptotic"
    T = zeros_1000.max_height
    assert res.normaliser == pytest.approx(T * np.log(T) / (2 * np.pi))


# -- weighted n-correlation --------------------------------------------------

def test_single_zero_density(zeros_1000):
    res = zeta_n_correlation(zeros_1000, PhiSpec(1), [W], n=1)
    assert res.relative_deviation < 0.05
    assert not res.conjectural


def test_pair_sum_equals_montgomery_reformulation(zeros_1000):
    phi = PhiSpec(2)
    res = zeta_n_correlation(zeros_1000, phi, [W, W])
    prof = PairProfile(phi)
    mont = montgomery_statistic(zeros_1000, prof, window="weighted", weights=[W, W],
                                T_weight=res.T_weight, mirror=True, U=prof.window)
    assert res.value == pytest.approx(mont.pair_sum, rel=1e-8)


def test_pair_prediction_uses_pair_system_form(zeros_1000):
    phi = PhiSpec(2)
    res = zeta_n_correlation(zeros_1000, phi, [W, W])
    assert res.logscale == pytest.approx(effective_logscale([W, W], res.T_weight))
    assert res.rs_prediction == pytest.approx(
        rs_sarnak_form(2, phi, [W, W], T_weight=res.T_weight, logscale=res.logscale), rel=1e-12)


def test_linear_in_phi_scale(zeros_1000):
    a = zeta_n_correlation(zeros_1000, PhiSpec(2, c=1.0), [W, W])
    b = zeta_n_correlation(zeros_1000, PhiSpec(2, c=2.5), [W, W])
    assert b.value == pytest.approx(2.5 * a.value, rel=1e-12)
    assert b.rs_prediction == pytest.approx(2.5 * a.rs_prediction, rel=1e-14)


def test_outside_proven_range(zeros_1000):
    phi = PhiSpec(2, q=2, eps=0.2)
    with pytest.raises(SupportError):
        zeta_n_correlation(zeros_1000, phi, [W, W])
    res = zeta_n_correlation(zeros_1000, phi, [W, W], force=True)
    assert res.conjectural


def test_T_cut_above_data(zeros_1000):
    with pytest.raises(ConfigError):
        zeta_n_correlation(zeros_1000, PhiSpec(1), [W], T_cut=1e6)
