"""Closed-form and semi-analytical performance results.

Covers the triangular density of the cascaded phase, the asymptotic
activation-probability quadrature, lower/upper bounds on the probability that
few elements are active, and the log-normal characterization of the channel
gain with its fitted coefficients (outage closed form and ergodic-rate upper
bound).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import dblquad

from .channel import CorrelationRegime, LinkBudget

PI = math.pi
TWO_PI = 2.0 * math.pi


def triangle_pdf(z):
    """Density of the cascaded (unwrapped) phase: triangular on [-2 pi, 2 pi]."""
    z = np.asarray(z, dtype=float)
    rising = (z + TWO_PI) / (4.0 * PI**2)
    falling = (-z + TWO_PI) / (4.0 * PI**2)
    out = np.where(
        (z >= -TWO_PI) & (z < 0.0), rising, np.where((z >= 0.0) & (z < TWO_PI), falling, 0.0)
    )
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ActivationQuadrature:
    """Components of the asymptotic activation probability."""

    p_a1: float
    p_a2: float
    p_a3: float
    p_a4: float
    p_geq: float
    p_leq: float
    p_c1_geq_c2: float
    p_c1_leq_c2: float
    p_a: float


def _rising(z: float) -> float:
    # joint density factor on z in [-2 pi, 0]: triangular rise times uniform direction
    return (z + TWO_PI) / (8.0 * PI**3)


def _falling(z: float) -> float:
    # joint density factor on z in [0, 2 pi]
    return (-z + TWO_PI) / (8.0 * PI**3)


def activation_prob_quadrature(epsabs: float = 1e-10) -> ActivationQuadrature:
    """Asymptotic activation probability by adaptive 2-D quadrature.

    All sixteen double integrals (four per endpoint-ordering case and tail)
    are evaluated over their exact limits; the four named components belong to
    the wrapped-endpoint case, and the two 0.125 subtotals sum to the 0.25
    contribution of that case.  The grand total is 0.5.
    """

    def integral(fz, th_lo, th_hi, z_lo, z_hi) -> float:
        val, _ = dblquad(lambda z, th: fz(z), th_lo, th_hi, z_lo, z_hi, epsabs=epsabs)
        return val

    half = PI / 2.0

    # endpoints swapped: membership splits into "above lower" and "below upper"
    p_a1 = integral(_falling, -half, 0.0, lambda th: th + 1.5 * PI, lambda th: TWO_PI)
    p_a2 = integral(_falling, 0.0, half, lambda th: th + 1.5 * PI, lambda th: TWO_PI)
    p_a3 = integral(_rising, -half, 0.0, lambda th: th - half, lambda th: 0.0)
    p_a4 = integral(_rising, 0.0, half, lambda th: th - half, lambda th: 0.0)
    p_geq = p_a1 + p_a2 + p_a3 + p_a4

    p_leq = (
        integral(_falling, -half, 0.0, lambda th: 0.0, lambda th: th + half)
        + integral(_falling, 0.0, half, lambda th: 0.0, lambda th: th + half)
        + integral(_rising, -half, 0.0, lambda th: -TWO_PI, lambda th: th - 1.5 * PI)
        + integral(_rising, 0.0, half, lambda th: -TWO_PI, lambda th: th - 1.5 * PI)
    )
    p_case_swapped = p_geq + p_leq

    # endpoints in order: membership is the band between them
    below_lower = (
        integral(_falling, half, PI, lambda th: 0.0, lambda th: th - half)
        + integral(_rising, half, PI, lambda th: -TWO_PI, lambda th: th - 2.5 * PI)
        + integral(_falling, -PI, -half, lambda th: 0.0, lambda th: th + 1.5 * PI)
        + integral(_rising, -PI, -half, lambda th: -TWO_PI, lambda th: th - half)
    )
    below_upper = (
        integral(_falling, half, PI, lambda th: 0.0, lambda th: th + half)
        + integral(_rising, half, PI, lambda th: -TWO_PI, lambda th: th - 1.5 * PI)
        + integral(_falling, -PI, -half, lambda th: 0.0, lambda th: th + 2.5 * PI)
        + integral(_rising, -PI, -half, lambda th: -TWO_PI, lambda th: th + half)
    )
    p_case_ordered = below_upper - below_lower

    return ActivationQuadrature(
        p_a1=p_a1,
        p_a2=p_a2,
        p_a3=p_a3,
        p_a4=p_a4,
        p_geq=p_geq,
        p_leq=p_leq,
        p_c1_geq_c2=p_case_swapped,
        p_c1_leq_c2=p_case_ordered,
        p_a=p_case_swapped + p_case_ordered,
    )


def _validate_rop_args(n: int, p_a: float, n_thr: int) -> None:
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0.0 < p_a < 1.0:
        raise ValueError("p_a must lie in (0, 1)")
    if not 0 <= n_thr <= n:
        raise ValueError("n_thr must lie in [0, n]")


def rop_lower(n: int, p_a: float, n_thr: int) -> float:
    """Lower bound on P(active count <= n_thr) for pairwise-independent states.

    ``1 - U`` where ``U`` upper-bounds the probability of exceeding the
    threshold; ``U`` uses a three-branch expression in the threshold relative
    to the mean of the reduced (n-1)-element count.  ``U`` is clamped to
    [0, 1] so the result is always a valid probability.
    """
    _validate_rop_args(n, p_a, n_thr)
    n_bar = n - 1
    q = 1.0 - p_a
    mean_bar = n_bar * p_a

    def branch2() -> float:
        return (n_bar * q + n_thr) * p_a / n_thr

    if n_thr < mean_bar:
        u = 1.0
    elif n_thr <= 1.0 + mean_bar:
        u = branch2()
    else:
        denom = n_thr - n * p_a
        if denom == 0.0:
            # integer coincidence n_thr == n * p_a: take the adjacent branch value
            u = branch2()
        else:
            zeta = math.ceil(n * p_a * (n_thr - 1.0 - mean_bar) / denom)
            top = n * n_bar * p_a**2 + (zeta - 1.0) * (zeta - 2.0 * n * p_a)
            bottom = (n_thr - zeta) ** 2 + (n_thr - zeta)
            u = branch2() if bottom == 0.0 else top / bottom
    return 1.0 - min(1.0, max(0.0, u))


def rop_upper(n: int, p_a: float, n_thr: int) -> float:
    """Binomial CDF upper bound on P(active count <= n_thr).

    Accumulated in log space so thresholds near the mean stay finite for
    n up to 1e4 and beyond.
    """
    _validate_rop_args(n, p_a, n_thr)
    if n_thr == n:
        return 1.0
    i = np.arange(n_thr + 1)
    log_terms = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(k + 1) + math.lgamma(n - k + 1) for k in i])
        + i * math.log(p_a)
        + (n - i) * math.log1p(-p_a)
    )
    peak = log_terms.max()
    return float(min(1.0, math.exp(peak) * np.exp(log_terms - peak).sum()))


@dataclass(frozen=True)
class FitCoefficients:
    """Power-law coefficients of the log-gain mean and standard deviation.

    ``mu(n) = a1 * n**b1 + c1`` and ``sigma_bar(n) = a2 * n**b2 + c2``,
    calibrated on array sizes in ``valid_n_range``.
    """

    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float
    regime: CorrelationRegime
    valid_n_range: Tuple[int, int] = (10, 500)


CORRELATED_FIT = FitCoefficients(
    a1=-533.1,
    b1=-0.003336,
    c1=532.3,
    a2=2.928,
    b2=-0.1783,
    c2=-0.6076,
    regime=CorrelationRegime.SPATIALLY_CORRELATED,
)

UNCORRELATED_FIT = FitCoefficients(
    a1=39.59,
    b1=0.03871,
    c1=-40.54,
    a2=1.725,
    b2=-0.3917,
    c2=-0.0354,
    regime=CorrelationRegime.IID,
)


def fit_coefficients(regime: CorrelationRegime) -> FitCoefficients:
    if regime is CorrelationRegime.SPATIALLY_CORRELATED:
        return CORRELATED_FIT
    return UNCORRELATED_FIT


class CalibrationRangeWarning(UserWarning):
    """Array size outside the range the gain fit was calibrated on."""


def lognormal_params(n: int, coeffs: FitCoefficients) -> Tuple[float, float]:
    """Mean and standard deviation of the log channel gain at array size n."""
    lo, hi = coeffs.valid_n_range
    if not lo <= n <= hi:
        warnings.warn(
            f"n={n} outside calibrated range [{lo}, {hi}]; extrapolating the gain fit",
            CalibrationRangeWarning,
            stacklevel=2,
        )
    mu = coeffs.a1 * n**coeffs.b1 + coeffs.c1
    sigma_bar = coeffs.a2 * n**coeffs.b2 + coeffs.c2
    return mu, sigma_bar


def outage_closed_form(rate: float, budget: LinkBudget, n: int, coeffs: FitCoefficients) -> float:
    """Outage probability of a target rate under the log-normal gain model."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    scale = budget.path_gain * budget.transmit_snr
    if scale <= 0:
        raise ValueError("path_gain * transmit_snr must be > 0")
    mu, sigma_bar = lognormal_params(n, coeffs)
    threshold = (2.0**rate - 1.0) / scale
    return 0.5 * (1.0 + math.erf((math.log(threshold) - mu) / (math.sqrt(2.0) * sigma_bar)))


def rate_upper_bound(budget: LinkBudget, n: int, coeffs: FitCoefficients) -> float:
    """Ergodic-rate upper bound from the mean of the log-normal gain."""
    mu, sigma_bar = lognormal_params(n, coeffs)
    mean_gain = math.exp(mu + sigma_bar**2 / 2.0)
    return math.log2(1.0 + budget.path_gain * budget.transmit_snr * mean_gain)
