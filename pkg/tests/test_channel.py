import math

import numpy as np
import pytest
from scipy import stats

from pbfree.channel import (
    CorrelationRegime,
    build_geometry,
    correlation_factor,
    dbm_to_watts,
    link_budget,
    sample_channels,
    sample_phase_errors,
)

WAVELENGTH = 299_792_458.0 / 1.8e9


def test_geometry_single_element_at_origin():
    geom = build_geometry(1, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    assert geom.positions.shape == (1, 3)
    np.testing.assert_allclose(geom.positions[0], 0.0)


def test_geometry_four_elements_square():
    d = WAVELENGTH / 8
    geom = build_geometry(4, d, d, WAVELENGTH)
    dists = np.linalg.norm(geom.positions[:, None] - geom.positions[None, :], axis=-1)
    assert dists.max() == pytest.approx(d * math.sqrt(2))


def test_geometry_40_elements_grid_convention():
    d = WAVELENGTH / 8
    geom = build_geometry(40, d, d, WAVELENGTH)
    assert geom.positions.shape == (40, 3)
    # floor(sqrt(40)) = 6 rows, 7 columns, last row partially filled
    rows = np.unique(geom.positions[:, 1])
    cols = np.unique(geom.positions[:, 0])
    assert len(rows) == 6
    assert len(cols) == 7
    # horizontally adjacent spacing is exactly d
    first_row = geom.positions[geom.positions[:, 1] == 0.0]
    assert np.diff(np.sort(first_row[:, 0])) == pytest.approx(d)
    # all positions distinct
    assert len({tuple(p) for p in geom.positions}) == 40


def test_geometry_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_geometry(0, 0.1, 0.1, WAVELENGTH)
    with pytest.raises(ValueError):
        build_geometry(4, -0.1, 0.1, WAVELENGTH)
    with pytest.raises(ValueError):
        build_geometry(4, 0.1, 0.1, 0.0)


def test_correlation_iid_identity():
    geom = build_geometry(12, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    np.testing.assert_array_equal(correlation_factor(geom, CorrelationRegime.IID), np.eye(12))


def test_correlation_half_wavelength_vanishes():
    geom = build_geometry(2, WAVELENGTH / 2, WAVELENGTH / 2, WAVELENGTH)
    factor = correlation_factor(geom, CorrelationRegime.SPATIALLY_CORRELATED)
    corr = factor @ factor.T
    assert corr[0, 1] == pytest.approx(0.0, abs=1e-12)


def test_correlation_eighth_wavelength_value():
    geom = build_geometry(2, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    factor = correlation_factor(geom, CorrelationRegime.SPATIALLY_CORRELATED)
    corr = factor @ factor.T
    # sinc(1/4) = sin(pi/4) / (pi/4)
    assert corr[0, 1] == pytest.approx(0.9003163161571061, abs=1e-12)


def test_correlation_factor_reproduces_matrix():
    geom = build_geometry(40, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    factor = correlation_factor(geom, CorrelationRegime.SPATIALLY_CORRELATED)
    diff = geom.positions[:, None, :] - geom.positions[None, :, :]
    corr = np.sinc(2.0 * np.sqrt((diff**2).sum(axis=-1)) / WAVELENGTH)
    assert np.linalg.norm(factor @ factor.T - corr) < 1e-9
    assert np.allclose(np.diag(corr), 1.0)


def test_sample_channels_moments_iid():
    geom = build_geometry(100_000, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    rng = np.random.default_rng(123)
    draw = sample_channels(rng, geom, CorrelationRegime.IID, np.eye(1))
    assert abs(draw.h.mean()) < 0.02
    assert abs(draw.h.var() - 1.0) < 0.02
    assert abs(draw.g.mean()) < 0.02
    assert abs(draw.g.var() - 1.0) < 0.02


def test_sample_channels_deterministic():
    geom = build_geometry(16, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    factor = correlation_factor(geom, CorrelationRegime.SPATIALLY_CORRELATED)
    a = sample_channels(np.random.default_rng(7), geom, CorrelationRegime.SPATIALLY_CORRELATED, factor)
    b = sample_channels(np.random.default_rng(7), geom, CorrelationRegime.SPATIALLY_CORRELATED, factor)
    np.testing.assert_array_equal(a.h, b.h)
    np.testing.assert_array_equal(a.g, b.g)


def test_sample_channels_empirical_correlation():
    geom = build_geometry(2, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    factor = correlation_factor(geom, CorrelationRegime.SPATIALLY_CORRELATED)
    rng = np.random.default_rng(11)
    draws = np.array(
        [
            sample_channels(rng, geom, CorrelationRegime.SPATIALLY_CORRELATED, factor).h
            for _ in range(100_000)
        ]
    )
    empirical = np.corrcoef(draws[:, 0].real, draws[:, 1].real)[0, 1]
    assert empirical == pytest.approx(0.9003163161571061, abs=0.01)


def test_iid_cross_correlation_below_two_percent():
    geom = build_geometry(4, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    rng = np.random.default_rng(13)
    draws = np.array(
        [sample_channels(rng, geom, CorrelationRegime.IID, np.eye(4)).h for _ in range(100_000)]
    )
    gram = draws.conj().T @ draws / len(draws)
    off_diag = gram - np.diag(np.diag(gram))
    assert np.abs(off_diag).max() < 0.02
    assert np.abs(np.diag(gram).real - 1.0).max() < 0.02


def test_correlated_sampling_preserves_unit_variance():
    geom = build_geometry(16, WAVELENGTH / 8, WAVELENGTH / 8, WAVELENGTH)
    factor = correlation_factor(geom, CorrelationRegime.SPATIALLY_CORRELATED)
    rng = np.random.default_rng(31)
    draws = np.array(
        [
            sample_channels(rng, geom, CorrelationRegime.SPATIALLY_CORRELATED, factor).h
            for _ in range(40_000)
        ]
    )
    per_element_var = (np.abs(draws) ** 2).mean(axis=0)
    assert np.abs(per_element_var - 1.0).max() < 0.02


def test_phase_errors_uniform_at_zero_kappa():
    rng = np.random.default_rng(17)
    draws = sample_phase_errors(rng, 1_000_000, 0.0)
    assert draws.min() >= -np.pi
    assert draws.max() < np.pi
    resultant = np.abs(np.exp(1j * draws).mean())
    assert resultant < 0.005


def test_phase_errors_uniformity_chi_square():
    rng = np.random.default_rng(19)
    draws = sample_phase_errors(rng, 1_000_000, 0.0)
    counts, _ = np.histogram(draws, bins=64, range=(-np.pi, np.pi))
    expected = len(draws) / 64
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < stats.chi2.ppf(0.99, 63)


def test_phase_errors_high_concentration():
    rng = np.random.default_rng(23)
    draws = sample_phase_errors(rng, 1_000_000, 100.0)
    circ_mean = np.angle(np.exp(1j * draws).mean())
    assert abs(circ_mean) < 0.01
    assert draws.var() == pytest.approx(1.0 / 100.0, rel=0.05)


def test_phase_errors_bessel_ratio():
    # independent series oracle: I1(2) / I0(2)
    def bessel_ratio(x, terms=40):
        i0 = sum((x / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))
        i1 = sum(
            (x / 2) ** (2 * k + 1) / (math.factorial(k) * math.factorial(k + 1))
            for k in range(terms)
        )
        return i1 / i0

    rng = np.random.default_rng(29)
    draws = sample_phase_errors(rng, 1_000_000, 2.0)
    resultant = np.abs(np.exp(1j * draws).mean())
    assert resultant == pytest.approx(bessel_ratio(2.0), abs=0.005)
    assert bessel_ratio(2.0) == pytest.approx(0.6977746579640081, abs=1e-12)


def test_phase_errors_negative_kappa_rejected():
    with pytest.raises(ValueError):
        sample_phase_errors(np.random.default_rng(0), 10, -1.0)


def test_link_budget_reference_values():
    budget = link_budget(40, WAVELENGTH, 10.0, 0.1, 1e-12)
    assert budget.r_source == 4.0
    assert 10 * math.log10(budget.path_gain) == pytest.approx(-97.2, abs=0.05)
    assert budget.path_gain == pytest.approx(1.9034e-10, rel=1e-3)
    assert budget.transmit_snr == 0.1 / 1e-12


def test_link_budget_ceiling_rule():
    assert link_budget(50, WAVELENGTH, 10.0, 0.1, 1e-12).r_source == 5.0


def test_link_budget_noise_conversion():
    assert dbm_to_watts(-90.0) == pytest.approx(1e-12)
    assert dbm_to_watts(20.0) == pytest.approx(0.1)
    budget = link_budget(40, WAVELENGTH, 10.0, dbm_to_watts(20.0), dbm_to_watts(-90.0))
    assert budget.transmit_snr == pytest.approx(1e11)


def test_link_budget_pure():
    a = link_budget(64, WAVELENGTH, 12.0, 0.05, 1e-12)
    b = link_budget(64, WAVELENGTH, 12.0, 0.05, 1e-12)
    assert a == b


def test_link_budget_override_and_validation():
    budget = link_budget(200, WAVELENGTH, 10.0, 0.1, 1e-12, r_source=5.0)
    assert budget.r_source == 5.0
    with pytest.raises(ValueError):
        link_budget(0, WAVELENGTH, 10.0, 0.1, 1e-12)
    with pytest.raises(ValueError):
        link_budget(10, WAVELENGTH, 10.0, 0.0, 1e-12)
