"""Trial engine and estimators.

Each trial owns an independent generator substream derived from
``(seed, trial_index)``, so results are bitwise-reproducible and independent
of chunking or worker scheduling.  Channel gain and active-element count do
not depend on transmit power, so one batch of channel trials serves a whole
power sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .beamforming import (
    DEFAULT_AMPLITUDE_PARAMS,
    AmplitudeModelParams,
    PbScheme,
    SchemeConfig,
    amplitude_of_phase,
    classical_batch,
    phase_free_batch,
    rpsa_batch,
)
from .channel import (
    DEFAULT_CARRIER_HZ,
    SPEED_OF_LIGHT,
    CorrelationRegime,
    LinkBudget,
    build_geometry,
    correlation_factor,
    dbm_to_watts,
    link_budget,
    sample_channels,
    sample_phase_errors,
)

DEFAULT_CHUNK = 2048


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulated scenario."""

    n_elements: int = 40
    carrier_freq: float = DEFAULT_CARRIER_HZ
    d_h: Optional[float] = None  # None -> wavelength / 8
    d_v: Optional[float] = None
    regime: CorrelationRegime = CorrelationRegime.IID
    kappa: Optional[float] = None  # None -> no phase errors; 0 -> uniform errors
    r_dest: float = 10.0
    noise_dbm: float = -90.0
    power_grid_dbm: Tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    rate_target: float = 1.0
    scheme: SchemeConfig = SchemeConfig()
    trials: int = 10_000
    seed: int = 0
    r_source_override: Optional[float] = None
    amplitude_params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.kappa is not None and self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        grid = tuple(float(p) for p in self.power_grid_dbm)
        if not grid:
            raise ValueError("power_grid_dbm must be non-empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("power_grid_dbm must be strictly increasing")
        object.__setattr__(self, "power_grid_dbm", grid)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def spacing_h(self) -> float:
        return self.d_h if self.d_h is not None else self.wavelength / 8.0

    @property
    def spacing_v(self) -> float:
        return self.d_v if self.d_v is not None else self.wavelength / 8.0

    def budget(self, power_dbm: float) -> LinkBudget:
        return link_budget(
            self.n_elements,
            self.wavelength,
            self.r_dest,
            dbm_to_watts(power_dbm),
            dbm_to_watts(self.noise_dbm),
            r_source=self.r_source_override,
        )


@dataclass(frozen=True)
class MetricEstimate:
    value: float
    std_error: float
    trials: int


@dataclass
class SimulationResult:
    """Per-trial outcomes of one scenario (power-independent quantities).

    ``n_stage1`` counts the elements selected by the half-plane membership
    stage alone (the event whose probability the activation-probability
    analysis bounds); ``n_active`` is the count after the greedy second stage
    and is what the realized gain uses.
    """

    config: ScenarioConfig
    gains: np.ndarray
    n_active: np.ndarray
    n_stage1: np.ndarray
    dominant_directions: np.ndarray
    tracked_activity: Optional[np.ndarray] = None

    def budget(self, power_dbm: float) -> LinkBudget:
        return self.config.budget(power_dbm)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=[int(seed), int(trial)]))


def run_trials(
    config: ScenarioConfig,
    chunk_size: int = DEFAULT_CHUNK,
    track_elements: Sequence[int] = (),
) -> SimulationResult:
    """Simulate all trials of a scenario.

    ``track_elements`` optionally records the on/off state of the given
    element indices per trial (phase-free scheme only).  The result is
    independent of ``chunk_size``.
    """
    n = config.n_elements
    geometry = build_geometry(n, config.spacing_h, config.spacing_v, config.wavelength)
    factor = correlation_factor(geometry, config.regime)
    kind = config.scheme.scheme

    gains = np.empty(config.trials)
    n_active = np.empty(config.trials, dtype=np.int64)
    n_stage1 = np.empty(config.trials, dtype=np.int64)
    theta_out = np.empty(config.trials)
    tracked = np.empty((config.trials, len(track_elements)), dtype=bool) if track_elements else None

    # cap the per-chunk matrix footprint so large arrays stay cache-friendly
    chunk_size = max(64, min(chunk_size, int(4_000_000 / max(n, 1))))
    for start in range(0, config.trials, chunk_size):
        stop = min(start + chunk_size, config.trials)
        count = stop - start
        h_mat = np.empty((count, n), dtype=complex)
        g_mat = np.empty((count, n), dtype=complex)
        errors = np.zeros((count, n)) if config.kappa is not None else None
        for i, t in enumerate(range(start, stop)):
            rng = _trial_rng(config.seed, t)
            draw = sample_channels(rng, geometry, config.regime, factor)
            h_mat[i] = draw.h
            g_mat[i] = draw.g
            if errors is not None:
                errors[i] = sample_phase_errors(rng, n, config.kappa)

        cascade = h_mat * g_mat
        if kind is PbScheme.PHASE_FREE:
            decision = cascade if errors is None else cascade * np.exp(1j * errors)
            active, stage1, theta = phase_free_batch(decision)
            sums = (cascade * active).sum(axis=1)
            amp = (
                1.0
                if config.scheme.ideal_full_reflection
                else amplitude_of_phase(math.pi, config.amplitude_params)
            )
            gains[start:stop] = amp**2 * np.abs(sums) ** 2
            n_active[start:stop] = active.sum(axis=1)
            n_stage1[start:stop] = stage1.sum(axis=1)
            theta_out[start:stop] = theta
            if tracked is not None:
                tracked[start:stop] = active[:, list(track_elements)]
        else:
            z_est = np.angle(cascade) if errors is None else np.angle(cascade) + errors
            if kind is PbScheme.CLASSICAL:
                theta_cfg, amps = classical_batch(z_est, config.scheme, config.amplitude_params)
            else:
                theta_cfg, amps = rpsa_batch(z_est, config.scheme, config.amplitude_params)
            sums = (amps * np.exp(1j * theta_cfg) * cascade).sum(axis=1)
            gains[start:stop] = np.abs(sums) ** 2
            n_active[start:stop] = n
            n_stage1[start:stop] = n
            theta_out[start:stop] = np.angle(cascade.sum(axis=1))

    return SimulationResult(
        config=config,
        gains=gains,
        n_active=n_active,
        n_stage1=n_stage1,
        dominant_directions=theta_out,
        tracked_activity=tracked,
    )


def estimate_outage(gains: np.ndarray, budget: LinkBudget, rate: float) -> MetricEstimate:
    """Fraction of trials whose achievable rate falls below the target."""
    gains = np.asarray(gains)
    if gains.size == 0:
        raise ValueError("gains must be non-empty")
    snr = budget.path_gain * budget.transmit_snr * gains
    p = float(np.mean(np.log2(1.0 + snr) < rate))
    se = math.sqrt(p * (1.0 - p) / gains.size)
    return MetricEstimate(value=p, std_error=se, trials=gains.size)


def estimate_rate(gains: np.ndarray, budget: LinkBudget) -> MetricEstimate:
    """Sample-mean achievable rate with its standard error."""
    gains = np.asarray(gains)
    if gains.size == 0:
        raise ValueError("gains must be non-empty")
    rates = np.log2(1.0 + budget.path_gain * budget.transmit_snr * gains)
    se = float(rates.std(ddof=1) / math.sqrt(rates.size)) if rates.size > 1 else 0.0
    return MetricEstimate(value=float(rates.mean()), std_error=se, trials=rates.size)


@dataclass(frozen=True)
class ActivationStats:
    """Summary statistics of the active-element count.

    ``p_a_hat`` is the fraction of elements on after both stages;
    ``p_a_stage1`` is the frequency of the half-plane membership event alone,
    the quantity the activation-probability bound concerns.
    """

    n_active: np.ndarray
    n_stage1: np.ndarray
    n_elements: int

    @property
    def mean_na(self) -> float:
        return float(self.n_active.mean())

    @property
    def mean_na_std_error(self) -> float:
        return float(self.n_active.std(ddof=1) / math.sqrt(self.n_active.size))

    @property
    def p_a_hat(self) -> float:
        return self.mean_na / self.n_elements

    @property
    def p_a_stage1(self) -> float:
        return float(self.n_stage1.mean()) / self.n_elements

    def rop_empirical(self, n_thr: int) -> float:
        return float(np.mean(self.n_active <= n_thr))

    def concentration(self, eps: float) -> float:
        mean = self.mean_na
        return float(np.mean(np.abs(self.n_active - mean) <= eps * mean))


def activation_stats(result: SimulationResult) -> ActivationStats:
    if result.config.scheme.scheme is not PbScheme.PHASE_FREE:
        raise ValueError("activation statistics apply to the phase-free scheme")
    return ActivationStats(
        n_active=result.n_active,
        n_stage1=result.n_stage1,
        n_elements=result.config.n_elements,
    )


def loglog_slope(n_values: Sequence[float], mean_gains: Sequence[float]) -> float:
    """Least-squares slope of log mean gain versus log array size."""
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.log(np.asarray(mean_gains, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass(frozen=True)
class ScalingResult:
    n_values: Tuple[int, ...]
    mean_gains: Tuple[float, ...]
    slope: float


def scaling_regression(n_list: Sequence[int], trials: int, seed: int) -> ScalingResult:
    """Growth exponent of the mean channel gain with array size."""
    n_list = tuple(int(n) for n in n_list)
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing with at least 3 sizes")
    means = []
    for n in n_list:
        config = ScenarioConfig(n_elements=n, trials=trials, seed=seed)
        result = run_trials(config)
        means.append(float(result.gains.mean()))
    return ScalingResult(
        n_values=n_list, mean_gains=tuple(means), slope=loglog_slope(n_list, means)
    )


MAX_ORACLE_ELEMENTS = 20


def exhaustive_oracle(h: np.ndarray, g: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    """Best on/off subset by enumeration of all 2**n patterns.

    Guarded to n <= 20.  Ties resolve to the lexicographically smallest
    index tuple.
    """
    h = np.asarray(h)
    g = np.asarray(g)
    n = len(h)
    if n > MAX_ORACLE_ELEMENTS:
        raise ValueError(f"exhaustive search limited to n <= {MAX_ORACLE_ELEMENTS}")
    cascade = h * g
    patterns = np.arange(2**n, dtype=np.uint32)
    masks = (patterns[:, None] >> np.arange(n)) & 1
    gains = np.abs(masks @ cascade) ** 2
    best_gain = gains.max()
    candidates = np.flatnonzero(gains == best_gain)
    subsets = [tuple(int(i) for i in np.flatnonzero(masks[c])) for c in candidates]
    return float(best_gain), min(subsets)


@dataclass(frozen=True)
class IndependenceReport:
    """Empirical joint/product CDFs at the origin and weight dominance."""

    joint_cdf_00: float
    product_cdf_00: float
    weight_dominance: float
    trials: int


def independence_checks(
    n: int, trials: int, seed: int, t: float = 10.0
) -> IndependenceReport:
    """Dominant-direction vs single-element statistics.

    Estimates P(direction <= 0 and first cascaded phase <= 0), the product of
    the marginal probabilities, and the probability that the magnitude of the
    remaining-element sum exceeds ``t`` times the first element's magnitude.
    Sampling is single precision: the estimates are coarse CDF values and the
    halved memory traffic matters at n = 1e5.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    theta_neg = 0
    z_neg = 0
    both_neg = 0
    dominant = 0
    for k in range(trials):
        rng = _trial_rng(seed, k)
        w = rng.standard_normal((4, n), dtype=np.float32)
        cascade = (w[0] + 1j * w[1]) * (w[2] + 1j * w[3]) / 2.0
        total = cascade.sum()
        theta = np.angle(total)
        z0 = np.angle(cascade[0])
        theta_neg += theta <= 0.0
        z_neg += z0 <= 0.0
        both_neg += (theta <= 0.0) and (z0 <= 0.0)
        dominant += abs(total - cascade[0]) > t * abs(cascade[0])
    return IndependenceReport(
        joint_cdf_00=both_neg / trials,
        product_cdf_00=(theta_neg / trials) * (z_neg / trials),
        weight_dominance=dominant / trials,
        trials=trials,
    )
