import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.integrate import quad

from pbfree.beamforming import phase_free_batch
from pbfree.channel import CorrelationRegime, LinkBudget, link_budget
from pbfree.theory import (
    CORRELATED_FIT,
    UNCORRELATED_FIT,
    CalibrationRangeWarning,
    activation_prob_quadrature,
    fit_coefficients,
    lognormal_params,
    outage_closed_form,
    rate_upper_bound,
    rop_lower,
    rop_upper,
    triangle_pdf,
)

WAVELENGTH = 299_792_458.0 / 1.8e9


# --- triangular phase density ----------------------------------------------


def test_triangle_pdf_peak_and_support():
    assert triangle_pdf(0.0) == pytest.approx(1.0 / (2 * np.pi))
    assert triangle_pdf(2 * np.pi) == 0.0
    assert triangle_pdf(-2 * np.pi) == pytest.approx(0.0)
    assert triangle_pdf(7.0) == 0.0
    assert triangle_pdf(-7.0) == 0.0


def test_triangle_pdf_normalization():
    total, _ = quad(triangle_pdf, -2 * np.pi, 2 * np.pi, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_triangle_pdf_symmetry():
    z = np.linspace(1e-9, 2 * np.pi - 1e-9, 1001)
    np.testing.assert_allclose(triangle_pdf(z), triangle_pdf(-z), atol=1e-15)


# --- activation-probability quadrature --------------------------------------

EXACT_COMPONENTS = {
    "p_a1": 7 / 384,
    "p_a2": 1 / 384,
    "p_a3": 29 / 384,
    "p_a4": 11 / 384,
    "p_geq": 1 / 8,
    "p_leq": 1 / 8,
    "p_c1_geq_c2": 1 / 4,
    "p_c1_leq_c2": 1 / 4,
    "p_a": 1 / 2,
}


def test_quadrature_matches_exact_fractions():
    quad_result = activation_prob_quadrature()
    for name, exact in EXACT_COMPONENTS.items():
        assert getattr(quad_result, name) == pytest.approx(exact, abs=1e-8), name


def test_quadrature_matches_published_roundings():
    quad_result = activation_prob_quadrature()
    assert quad_result.p_a1 == pytest.approx(0.0182, abs=5e-4)
    assert quad_result.p_a2 == pytest.approx(0.0026, abs=5e-4)
    assert quad_result.p_a3 == pytest.approx(0.0755, abs=5e-4)
    assert quad_result.p_a4 == pytest.approx(0.0286, abs=5e-4)
    assert quad_result.p_geq == pytest.approx(0.125, abs=1e-3)
    assert quad_result.p_leq == pytest.approx(0.125, abs=1e-3)
    assert quad_result.p_a == pytest.approx(0.5, abs=1e-3)


def test_quadrature_convergence():
    coarse = activation_prob_quadrature(epsabs=1e-8)
    fine = activation_prob_quadrature(epsabs=1e-11)
    for name in EXACT_COMPONENTS:
        assert abs(getattr(coarse, name) - getattr(fine, name)) < 1e-6


# --- active-count outage bounds ---------------------------------------------


def test_rop_lower_branch_cases():
    assert rop_lower(2, 0.5, 0) == 0.0
    assert rop_lower(2, 0.5, 1) == pytest.approx(0.25)


def test_rop_upper_small_cases():
    assert rop_upper(2, 0.5, 1) == pytest.approx(0.75)
    assert rop_upper(2, 0.5, 2) == 1.0
    assert rop_upper(137, 0.53, 137) == 1.0


def test_rop_upper_large_n_stable():
    value = rop_upper(5000, 0.5058, 2500)
    assert 0.0 < value < 1.0
    assert np.isfinite(value)


def test_rop_upper_matches_exact_rational_oracle():
    p = Fraction(542, 1000)
    exact = sum(
        Fraction(math.comb(100, i)) * p**i * (1 - p) ** (100 - i) for i in range(51)
    )
    assert rop_upper(100, 0.542, 50) == pytest.approx(float(exact), abs=1e-12)


def test_rop_validation():
    for bad in [(1, 0.5, 0), (10, 0.0, 5), (10, 1.0, 5), (10, 0.5, 11), (10, 0.5, -1)]:
        with pytest.raises(ValueError):
            rop_lower(*bad)
        with pytest.raises(ValueError):
            rop_upper(*bad)


@given(
    st.integers(min_value=2, max_value=400),
    st.floats(min_value=0.5, max_value=0.6),
    st.data(),
)
@settings(max_examples=300, deadline=None)
def test_rop_lower_below_upper(n, p_a, data):
    n_thr = data.draw(st.integers(min_value=0, max_value=n))
    assert rop_lower(n, p_a, n_thr) <= rop_upper(n, p_a, n_thr) + 1e-12


def test_rop_lower_against_enumeration_oracle():
    # exact active-count law under exhaustive quantized-angle configurations
    for n, levels in ((4, 10), (5, 8), (6, 6)):
        grids = np.array(list(itertools.product(range(levels), repeat=n)))
        angles = -np.pi + 2 * np.pi * (grids + 0.5) / levels
        active, _, _ = phase_free_batch(np.exp(1j * angles))
        counts = active.sum(axis=1)
        p_hat = counts.mean() / n
        for thr in range(n + 1):
            exact = np.mean(counts <= thr)
            assert rop_lower(n, p_hat, thr) <= exact + 1e-12


# --- log-normal gain fit -----------------------------------------------------


def test_fit_selection_by_regime():
    assert fit_coefficients(CorrelationRegime.IID) is UNCORRELATED_FIT
    assert fit_coefficients(CorrelationRegime.SPATIALLY_CORRELATED) is CORRELATED_FIT


def test_lognormal_params_correlated_asymptote():
    mu, sigma_bar = lognormal_params(500, CORRELATED_FIT)
    assert mu == pytest.approx(10.1, abs=0.05)
    assert sigma_bar == pytest.approx(0.359, abs=0.005)


def test_lognormal_params_uncorrelated_value():
    mu, sigma_bar = lognormal_params(100, UNCORRELATED_FIT)
    assert mu == pytest.approx(6.775725, abs=1e-5)
    assert sigma_bar == pytest.approx(0.248646, abs=1e-5)


def test_lognormal_params_positive_over_calibrated_range():
    for coeffs in (CORRELATED_FIT, UNCORRELATED_FIT):
        for n in range(10, 501):
            mu, sigma_bar = lognormal_params(n, coeffs)
            assert mu > 0.0
            assert sigma_bar > 0.0


def test_lognormal_params_warns_out_of_range():
    with pytest.warns(CalibrationRangeWarning):
        lognormal_params(5000, UNCORRELATED_FIT)
    with pytest.warns(CalibrationRangeWarning):
        lognormal_params(9, CORRELATED_FIT)


# --- outage closed form ------------------------------------------------------


def _budget_with_scale(scale: float) -> LinkBudget:
    # contrived budget whose path_gain * transmit_snr equals `scale`
    return LinkBudget(r_source=1.0, r_dest=1.0, path_gain=scale, noise_power=1.0, tx_power=1.0)


def test_outage_median_point():
    mu, _ = lognormal_params(200, UNCORRELATED_FIT)
    scale = (2.0**1.0 - 1.0) / math.exp(mu)
    assert outage_closed_form(1.0, _budget_with_scale(scale), 200, UNCORRELATED_FIT) == pytest.approx(0.5)


def test_outage_vanishes_at_high_snr():
    assert outage_closed_form(1.0, _budget_with_scale(1e12), 200, UNCORRELATED_FIT) < 1e-10


def test_outage_monotone_in_power():
    values = [
        outage_closed_form(1.0, _budget_with_scale(10.0**e), 100, UNCORRELATED_FIT)
        for e in np.linspace(-6, 6, 40)
    ]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)


def test_outage_matches_lognorm_cdf():
    mu, sigma_bar = lognormal_params(150, UNCORRELATED_FIT)
    for scale in np.logspace(-4, 3, 100):
        threshold = (2.0**1.5 - 1.0) / scale
        expected = stats.lognorm.cdf(threshold, s=sigma_bar, scale=math.exp(mu))
        got = outage_closed_form(1.5, _budget_with_scale(scale), 150, UNCORRELATED_FIT)
        assert got == pytest.approx(expected, abs=1e-10)


def test_outage_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        outage_closed_form(0.0, _budget_with_scale(1.0), 100, UNCORRELATED_FIT)
    with pytest.raises(ValueError):
        outage_closed_form(1.0, _budget_with_scale(0.0), 100, UNCORRELATED_FIT)


# --- ergodic-rate upper bound ------------------------------------------------


def test_rate_bound_vanishes_without_link():
    assert rate_upper_bound(_budget_with_scale(1e-300), 100, UNCORRELATED_FIT) == pytest.approx(
        0.0, abs=1e-10
    )


def test_rate_bound_reference_value():
    assert rate_upper_bound(_budget_with_scale(1.0), 100, UNCORRELATED_FIT) == pytest.approx(
        9.8215, abs=0.002
    )


def test_rate_bound_increasing_in_power():
    values = [
        rate_upper_bound(_budget_with_scale(10.0**e), 64, CORRELATED_FIT)
        for e in np.linspace(-3, 3, 25)
    ]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_rate_bound_with_real_budget():
    budget = link_budget(100, WAVELENGTH, 10.0, 0.1, 1e-12)
    value = rate_upper_bound(budget, 100, UNCORRELATED_FIT)
    assert 0.0 < value < 40.0
