"""Phase-shift-free RIS passive beamforming: simulator, benchmarks and theory."""

from .beamforming import (
    AmplitudeModelParams,
    PbScheme,
    ReflectionState,
    SchemeConfig,
    amplitude_of_phase,
    classical_pb,
    dominant_direction,
    effective_gain,
    phase_free_pb,
    rpsa_pb,
    snr,
    wrap_angle,
)
from .channel import (
    ChannelRealization,
    CorrelationRegime,
    LinkBudget,
    RisGeometry,
    build_geometry,
    correlation_factor,
    link_budget,
    sample_channels,
    sample_phase_errors,
)
from .montecarlo import (
    ActivationStats,
    MetricEstimate,
    ScenarioConfig,
    SimulationResult,
    activation_stats,
    estimate_outage,
    estimate_rate,
    exhaustive_oracle,
    independence_checks,
    run_trials,
    scaling_regression,
)
from .theory import (
    CORRELATED_FIT,
    UNCORRELATED_FIT,
    CalibrationRangeWarning,
    FitCoefficients,
    activation_prob_quadrature,
    fit_coefficients,
    lognormal_params,
    outage_closed_form,
    rate_upper_bound,
    rop_lower,
    rop_upper,
    triangle_pdf,
)

__version__ = "0.1.0"
