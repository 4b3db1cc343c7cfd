"""RIS geometry, correlated Rayleigh channel draws, phase errors and link budget.

The cascaded source-RIS-destination link is modelled per element as the product
of two unit-variance circular complex Gaussian coefficients.  Spatial
correlation across the planar array follows the isotropic sinc model
``R[n, m] = sinc(2 * d_nm / wavelength)`` (``sinc(x) = sin(pi x) / (pi x)``),
which has unit diagonal and vanishes at half-wavelength spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s
DEFAULT_CARRIER_HZ = 1.8e9


class CorrelationRegime(Enum):
    """Channel correlation regime across RIS elements."""

    IID = "iid"
    SPATIALLY_CORRELATED = "correlated"


@dataclass(frozen=True)
class RisGeometry:
    """Planar rectangular RIS grid.

    Elements fill a row-major grid with ``rows = floor(sqrt(n_elements))`` and
    ``cols = ceil(n_elements / rows)``; the last row may be partially filled.
    ``positions`` holds one 3-D point per element in meters.
    """

    n_elements: int
    d_h: float
    d_v: float
    wavelength: float
    positions: np.ndarray


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the two hops (and optionally per-element phase errors)."""

    h: np.ndarray
    g: np.ndarray
    phase_errors: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.h)
        if len(self.g) != n:
            raise ValueError("h and g must have equal length")
        if self.phase_errors is not None:
            if len(self.phase_errors) != n:
                raise ValueError("phase_errors must match channel length")


@dataclass(frozen=True)
class LinkBudget:
    """End-to-end power budget of the reflected link."""

    r_source: float
    r_dest: float
    path_gain: float
    noise_power: float
    tx_power: float

    @property
    def transmit_snr(self) -> float:
        return self.tx_power / self.noise_power


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def build_geometry(n_elements: int, d_h: float, d_v: float, wavelength: float) -> RisGeometry:
    """Lay out ``n_elements`` on a near-square planar grid.

    Raises ``ValueError`` for a non-positive element count or dimensions.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if d_h <= 0 or d_v <= 0 or wavelength <= 0:
        raise ValueError("d_h, d_v and wavelength must be positive")
    rows = int(math.floor(math.sqrt(n_elements)))
    cols = int(math.ceil(n_elements / rows))
    idx = np.arange(n_elements)
    positions = np.zeros((n_elements, 3))
    positions[:, 0] = (idx % cols) * d_h
    positions[:, 1] = (idx // cols) * d_v
    return RisGeometry(
        n_elements=n_elements, d_h=d_h, d_v=d_v, wavelength=wavelength, positions=positions
    )


def correlation_factor(geometry: RisGeometry, regime: CorrelationRegime) -> np.ndarray:
    """Real factor ``F`` with ``F @ F.T`` equal to the element correlation matrix.

    The iid regime returns the identity.  For the spatially correlated regime
    the sinc correlation matrix is factored through a symmetric
    eigendecomposition; negative eigenvalues (numerical noise, the model is
    positive semi-definite) are clipped to zero.
    """
    n = geometry.n_elements
    if regime is CorrelationRegime.IID:
        return np.eye(n)
    diff = geometry.positions[:, None, :] - geometry.positions[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    corr = np.sinc(2.0 * dist / geometry.wavelength)
    eigval, eigvec = np.linalg.eigh(corr)
    eigval = np.clip(eigval, 0.0, None)
    return (eigvec * np.sqrt(eigval)) @ eigvec.T


def sample_channels(
    rng: np.random.Generator,
    geometry: RisGeometry,
    regime: CorrelationRegime,
    factor: np.ndarray,
) -> ChannelRealization:
    """Draw one realization of both hops.

    ``h`` is drawn before ``g`` (two standard-normal blocks each); this order
    is part of the reproducibility contract.  Each hop is ``factor @ w`` with
    ``w`` standard circular complex Gaussian, so per-element variance is one
    and the empirical correlation matches ``factor @ factor.T``.
    """
    n = geometry.n_elements
    wh = rng.standard_normal((2, n))
    wg = rng.standard_normal((2, n))
    h = (wh[0] + 1j * wh[1]) / np.sqrt(2.0)
    g = (wg[0] + 1j * wg[1]) / np.sqrt(2.0)
    if regime is not CorrelationRegime.IID:
        h = factor @ h
        g = factor @ g
    return ChannelRealization(h=h, g=g)


def sample_phase_errors(rng: np.random.Generator, n: int, kappa: float) -> np.ndarray:
    """Draw ``n`` zero-mean Von Mises phase errors, wrapped to [-pi, pi).

    ``kappa == 0`` short-circuits to the exact uniform distribution (the
    maximal-error case); larger concentrations use the exact
    rejection sampler behind ``Generator.vonmises``.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if kappa == 0:
        draws = rng.uniform(-np.pi, np.pi, size=n)
    else:
        draws = rng.vonmises(0.0, kappa, size=n)
    return (draws + np.pi) % (2.0 * np.pi) - np.pi


def link_budget(
    n_elements: int,
    wavelength: float,
    r_dest: float,
    tx_power: float,
    noise_power: float,
    r_source: Optional[float] = None,
) -> LinkBudget:
    """Distances, path gain and transmit SNR for the reflected link.

    The source-RIS distance defaults to ``ceil(n_elements * wavelength / 2)``
    meters (far-field rule, growing with the array aperture) and can be pinned
    explicitly via ``r_source`` for sweeps that isolate the array-size effect.
    The two-hop path gain is ``wavelength**4 / (256 pi^2 r_s^2 r_d^2)``.
    """
    if min(n_elements, wavelength, r_dest, tx_power, noise_power) <= 0:
        raise ValueError("all link budget arguments must be positive")
    if r_source is None:
        r_source = float(math.ceil(n_elements * wavelength / 2.0))
    path_gain = wavelength**4 / (256.0 * math.pi**2 * r_source**2 * r_dest**2)
    return LinkBudget(
        r_source=r_source,
        r_dest=r_dest,
        path_gain=path_gain,
        noise_power=noise_power,
        tx_power=tx_power,
    )
