"""Reflection-state selection schemes and the hardware amplitude model.

Three schemes are implemented:

* ``phase_free_pb``: the on/off selection scheme.  Every element is
  fabricated with a fixed reflection phase of pi and only its on/off state is
  chosen: stage 1 activates the elements whose cascaded phase falls within
  a half-plane around the dominant direction; stage 2 greedily adds any
  remaining element that increases the magnitude of the running sum.
* ``classical_pb``: quantize the phase that cancels each element's cascaded
  phase onto a discrete level set; the realized amplitude follows the
  phase-amplitude coupling curve.
* ``rpsa_pb``: per element, pick the level maximizing the amplitude-weighted
  real-axis contribution, trading alignment against reflection loss.

All functions are pure; batched variants (suffix ``_batch``) operate on
``(trials, n)`` matrices and are the fast path used by the trial engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .channel import LinkBudget

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AmplitudeModelParams:
    """Constants of the reflection amplitude-vs-phase coupling curve."""

    a_min: float = 0.2
    b_hrz: float = 0.43 * math.pi
    c_stp: float = 1.6

    def __post_init__(self):
        if not 0.0 <= self.a_min <= 1.0:
            raise ValueError("a_min must lie in [0, 1]")
        if self.b_hrz < 0 or self.c_stp < 0:
            raise ValueError("b_hrz and c_stp must be >= 0")


DEFAULT_AMPLITUDE_PARAMS = AmplitudeModelParams()


class PbScheme(Enum):
    PHASE_FREE = "phase_free"
    CLASSICAL = "classical_pb"
    RPSA = "rpsa"


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme selector plus the knobs shared by the benchmark schemes.

    ``phase_levels=None`` selects the continuous diagnostic mode of the
    classical scheme (no quantization).  ``ideal_full_reflection`` applies to
    the on/off scheme only: active elements reflect with unit amplitude by
    default, or with the coupling-curve amplitude at phase pi when False.
    """

    scheme: PbScheme = PbScheme.PHASE_FREE
    phase_levels: Optional[int] = 2
    amplitude_coupling: bool = True
    ideal_full_reflection: bool = True

    def __post_init__(self):
        if self.phase_levels is not None and self.phase_levels < 1:
            raise ValueError("phase_levels must be >= 1")


@dataclass
class ReflectionState:
    """Per-element reflection configuration chosen by a scheme.

    ``phases`` are the scheme-chosen phases; ``realized_phases`` include any
    phase error applied by the hardware.  ``amplitudes`` are the effective
    reflection amplitudes entering the received sum (zero for an off element).
    ``stage1_tests``/``stage2_tests`` count membership and greedy tests of the
    on/off scheme (zero for the benchmarks).
    """

    amplitudes: np.ndarray
    phases: np.ndarray
    realized_phases: np.ndarray
    active_set: tuple = ()
    dominant_direction: Optional[float] = None
    stage1_tests: int = 0
    stage2_tests: int = 0


def wrap_angle(s):
    """Map an angle in (-2 pi, 4 pi) to its natural range via one shift.

    Three branches: identity on [0, 2 pi], add 2 pi below zero, subtract
    2 pi above 2 pi.  Works on scalars and arrays.
    """
    s = np.asarray(s, dtype=float)
    out = np.where(s < 0.0, s + TWO_PI, np.where(s > TWO_PI, s - TWO_PI, s))
    return float(out) if out.ndim == 0 else out


def amplitude_of_phase(theta, params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS):
    """Reflection amplitude produced by an applied phase shift."""
    theta = np.asarray(theta, dtype=float)
    base = (np.sin(theta - params.b_hrz) + 1.0) / 2.0
    out = (1.0 - params.a_min) * base**params.c_stp + params.a_min
    return float(out) if out.ndim == 0 else out


def dominant_direction(h: np.ndarray, g: np.ndarray) -> float:
    """Argument of the summed cascaded coefficients, in (-pi, pi].

    An exactly-zero sum returns 0.0 by convention (measure-zero input).
    """
    if len(h) != len(g):
        raise ValueError("h and g must have equal length")
    return float(np.angle(np.sum(np.asarray(h) * np.asarray(g))))


def _halfplane_membership(theta: np.ndarray, wrapped_z: np.ndarray) -> np.ndarray:
    """Stage-1 membership: wrapped phase inside the arc theta +- pi/2.

    ``theta`` has shape (trials,), ``wrapped_z`` shape (trials, n).  The arc
    endpoints are wrapped individually; when the lower endpoint wraps past the
    upper one, the region is the union of the two arcs around zero.  Boundary
    values are inclusive.
    """
    c1 = wrap_angle(theta - math.pi / 2.0)[:, None]
    c2 = wrap_angle(theta + math.pi / 2.0)[:, None]
    simple = (wrapped_z >= c1) & (wrapped_z <= c2)
    wrapped = (wrapped_z >= c1) | (wrapped_z <= c2)
    return np.where(c1 <= c2, simple, wrapped)


def phase_free_batch(decision: np.ndarray):
    """Run the on/off selection on a ``(trials, n)`` cascade matrix.

    ``decision`` holds the per-element cascaded coefficients the controller
    believes in (true values, or phase-perturbed estimates under noisy CSI).
    Returns ``(active, stage1, theta)`` where ``active`` is the boolean
    on/off matrix after both stages, ``stage1`` the membership matrix of the
    first stage alone and ``theta`` the per-trial dominant direction.
    """
    decision = np.atleast_2d(decision)
    trials, n = decision.shape
    theta = np.angle(decision.sum(axis=1))
    stage1 = _halfplane_membership(theta, wrap_angle(np.angle(decision)))
    active = stage1.copy()
    running = (decision * active).sum(axis=1)
    mag = np.abs(running)
    for k in range(n):
        candidate = ~active[:, k]
        if not candidate.any():
            continue
        trial_sum = running + decision[:, k]
        improves = candidate & (np.abs(trial_sum) > mag)
        running = np.where(improves, trial_sum, running)
        mag = np.where(improves, np.abs(trial_sum), mag)
        active[:, k] |= improves
    return active, stage1, theta


def phase_free_pb(
    h: np.ndarray,
    g: np.ndarray,
    estimated_phase_errors: Optional[np.ndarray] = None,
    scheme: SchemeConfig = SchemeConfig(),
    params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS,
) -> ReflectionState:
    """Two-stage on/off selection for fixed-phase (pi) elements.

    When ``estimated_phase_errors`` is given, the controller's view of each
    cascaded coefficient is rotated by the corresponding error before any
    decision is taken (noisy CSI); the realized reflection phase stays exactly
    pi since there is nothing to tune.
    """
    h = np.asarray(h)
    g = np.asarray(g)
    if h.shape != g.shape:
        raise ValueError("h and g must have equal length")
    cascade = h * g
    decision = cascade
    if estimated_phase_errors is not None:
        decision = cascade * np.exp(1j * np.asarray(estimated_phase_errors))
    n = len(cascade)

    theta = float(np.angle(decision.sum()))
    wrapped = wrap_angle(np.angle(decision))
    member = _halfplane_membership(np.array([theta]), wrapped[None, :])[0]
    order = [k for k in range(n) if member[k]]

    running = decision[member].sum()
    stage2 = 0
    for k in range(n):
        if member[k]:
            continue
        stage2 += 1
        trial_sum = running + decision[k]
        if abs(trial_sum) > abs(running):
            running = trial_sum
            member[k] = True
            order.append(k)

    on_amplitude = 1.0 if scheme.ideal_full_reflection else float(amplitude_of_phase(math.pi, params))
    amplitudes = np.where(member, on_amplitude, 0.0)
    phases = np.full(n, math.pi)
    return ReflectionState(
        amplitudes=amplitudes,
        phases=phases,
        realized_phases=phases.copy(),
        active_set=tuple(order),
        dominant_direction=theta,
        stage1_tests=n,
        stage2_tests=stage2,
    )


def _quantize_levels(target: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Index of the circularly nearest level for each target phase.

    Exact ties resolve to the smaller level (``argmin`` keeps the first).
    """
    delta = target[..., None] - levels
    dist = np.abs(np.angle(np.exp(1j * delta)))
    return np.argmin(dist, axis=-1)


def classical_batch(
    z_est: np.ndarray,
    scheme: SchemeConfig,
    params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS,
):
    """Chosen phases and amplitudes of the classical scheme, element-wise.

    ``z_est`` is the controller's estimate of the cascaded phase (true phase
    plus estimation error, if any).  Returns ``(theta, amplitudes)``.
    """
    target = -np.asarray(z_est)
    if scheme.phase_levels is None:
        theta = target
    else:
        levels = TWO_PI * np.arange(scheme.phase_levels) / scheme.phase_levels
        theta = levels[_quantize_levels(target, levels)]
    amps = amplitude_of_phase(theta, params) if scheme.amplitude_coupling else np.ones_like(theta)
    return theta, amps


def classical_pb(
    h: np.ndarray,
    g: np.ndarray,
    phase_errors: np.ndarray,
    scheme: SchemeConfig = SchemeConfig(scheme=PbScheme.CLASSICAL),
    params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS,
) -> ReflectionState:
    """Phase-cancelling benchmark with discrete levels and coupled amplitude.

    ``phase_errors`` perturb the estimated cascaded phase before the ideal
    cancelling phase is quantized to the circularly nearest level; the
    hardware then realizes that level exactly, with the coupling-curve
    amplitude of the applied level.
    """
    h = np.asarray(h)
    g = np.asarray(g)
    if h.shape != g.shape:
        raise ValueError("h and g must have equal length")
    z_est = np.angle(h * g) + np.asarray(phase_errors)
    theta, amps = classical_batch(z_est, scheme, params)
    theta = np.asarray(theta, dtype=float)
    return ReflectionState(
        amplitudes=np.asarray(amps, dtype=float),
        phases=theta,
        realized_phases=theta.copy(),
        active_set=tuple(int(k) for k in np.flatnonzero(amps > 0)),
    )


def rpsa_batch(
    z_est: np.ndarray,
    scheme: SchemeConfig,
    params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS,
):
    """Amplitude-weighted alignment selection over the discrete level set."""
    if scheme.phase_levels is None:
        raise ValueError("rpsa requires a discrete level set")
    z_est = np.asarray(z_est)
    levels = TWO_PI * np.arange(scheme.phase_levels) / scheme.phase_levels
    level_amps = amplitude_of_phase(levels, params)
    scores = level_amps * np.cos(z_est[..., None] + levels)
    # ties go to the first (smallest) level
    best = np.argmax(scores, axis=-1)
    theta = levels[best]
    amps = level_amps[best] if scheme.amplitude_coupling else np.ones_like(theta)
    return theta, amps


def rpsa_pb(
    h: np.ndarray,
    g: np.ndarray,
    phase_errors: np.ndarray,
    scheme: SchemeConfig = SchemeConfig(scheme=PbScheme.RPSA),
    params: AmplitudeModelParams = DEFAULT_AMPLITUDE_PARAMS,
) -> ReflectionState:
    """Benchmark trading phase alignment against reflection amplitude loss.

    Each element independently picks the level maximizing
    ``amplitude(level) * cos(level + estimated_cascaded_phase)``; as in the
    classical scheme, ``phase_errors`` corrupt the estimate and the chosen
    level is realized exactly.
    """
    h = np.asarray(h)
    g = np.asarray(g)
    if h.shape != g.shape:
        raise ValueError("h and g must have equal length")
    z_est = np.angle(h * g) + np.asarray(phase_errors)
    theta, amps = rpsa_batch(z_est, scheme, params)
    theta = np.asarray(theta, dtype=float)
    return ReflectionState(
        amplitudes=np.asarray(amps, dtype=float),
        phases=theta,
        realized_phases=theta.copy(),
        active_set=tuple(int(k) for k in np.flatnonzero(amps > 0)),
    )


def effective_gain(h: np.ndarray, g: np.ndarray, state: ReflectionState) -> float:
    """Squared magnitude of the reflected sum under a reflection state."""
    coeff = state.amplitudes * np.exp(1j * state.realized_phases)
    return float(np.abs(np.sum(coeff * np.asarray(h) * np.asarray(g))) ** 2)


def snr(gain: float, budget: LinkBudget) -> float:
    """Instantaneous SNR: path gain times transmit SNR times channel gain."""
    if gain < 0:
        raise ValueError("gain must be >= 0")
    return budget.path_gain * budget.transmit_snr * gain
