"""Named figure presets: canned scenario sweeps written as CSV tables.

Each preset expands to one or more scenarios plus the matching closed-form
curves, and writes one CSV per curve family into the output directory.  All
numeric cells are printed with nine significant digits; files are
byte-identical across runs with the same seed and trial count.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .beamforming import PbScheme, SchemeConfig
from .channel import CorrelationRegime
from .montecarlo import (
    ScenarioConfig,
    activation_stats,
    estimate_outage,
    estimate_rate,
    independence_checks,
    run_trials,
    scaling_regression,
)
from .theory import fit_coefficients, outage_closed_form, rate_upper_bound, rop_lower, rop_upper

SCHEME_LABELS = (
    ("phase_free", SchemeConfig(scheme=PbScheme.PHASE_FREE)),
    ("classical_pb", SchemeConfig(scheme=PbScheme.CLASSICAL)),
    ("rpsa", SchemeConfig(scheme=PbScheme.RPSA)),
)

REGIME_LABELS = (
    ("iid", CorrelationRegime.IID),
    ("correlated", CorrelationRegime.SPATIALLY_CORRELATED),
)


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".9g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")


def _preset_fig2b(seed: int, trials: int, out_dir: Path) -> List[Path]:
    result = scaling_regression((16, 32, 64, 128, 256), trials=trials, seed=seed)
    rows: List[Sequence] = [(n, g) for n, g in zip(result.n_values, result.mean_gains)]
    rows.append(("slope", result.slope))
    path = out_dir / "fig2b_sim.csv"
    write_csv(path, ("n", "mean_gain"), rows)
    return [path]


def _preset_fig3a(seed: int, trials: int, out_dir: Path) -> List[Path]:
    n_list = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000)
    rows = []
    for n in n_list:
        res = run_trials(ScenarioConfig(n_elements=n, trials=trials, seed=seed))
        st = activation_stats(res)
        rows.append((n, st.p_a_stage1, st.p_a_hat))
    sim = out_dir / "fig3a_sim.csv"
    write_csv(sim, ("n", "activation_probability", "on_fraction_after_stage2"), rows)
    theory = out_dir / "fig3a_theory.csv"
    write_csv(theory, ("n", "activation_probability_lower_bound"), [(n, 0.5) for n in n_list])
    return [sim, theory]


def _preset_fig3b(seed: int, trials: int, out_dir: Path) -> List[Path]:
    n_list = (10, 20, 50, 100, 200, 500, 1000)
    rows = []
    for n in n_list:
        rep = independence_checks(n, trials, seed)
        rows.append((n, rep.joint_cdf_00, rep.product_cdf_00))
    path = out_dir / "fig3b_sim.csv"
    write_csv(path, ("n", "joint_cdf_00", "product_cdf_00"), rows)
    return [path]


def _outage_rate_sweep(
    out_dir: Path,
    stem: str,
    configs: Sequence[tuple],
    rate_target: Optional[float],
) -> List[Path]:
    """Shared writer for outage (rate_target set) or rate (None) sweeps."""
    sim_rows = []
    theory_rows = []
    for label, regime_label, config in configs:
        res = run_trials(config)
        coeffs = fit_coefficients(config.regime)
        for p in config.power_grid_dbm:
            budget = res.budget(p)
            if rate_target is not None:
                est = estimate_outage(res.gains, budget, rate_target)
                closed = outage_closed_form(rate_target, budget, config.n_elements, coeffs)
            else:
                est = estimate_rate(res.gains, budget)
                closed = rate_upper_bound(budget, config.n_elements, coeffs)
            sim_rows.append((config.n_elements, label, regime_label, p, est.value, est.std_error))
            theory_rows.append((config.n_elements, label, regime_label, p, closed))
    metric = "outage" if rate_target is not None else "rate"
    sim = out_dir / f"{stem}_sim.csv"
    write_csv(sim, ("n", "scheme", "regime", "tx_power_dbm", metric, "std_error"), sim_rows)
    theory = out_dir / f"{stem}_theory.csv"
    theory_col = "outage_closed_form" if rate_target is not None else "rate_upper_bound"
    write_csv(theory, ("n", "scheme", "regime", "tx_power_dbm", theory_col), theory_rows)
    return [sim, theory]


def _preset_fig4a(seed: int, trials: int, out_dir: Path) -> List[Path]:
    grid = tuple(range(-30, 11, 2))
    configs = []
    for regime_label, regime in REGIME_LABELS:
        for n in (40, 100, 200):
            configs.append(
                (
                    "phase_free",
                    regime_label,
                    ScenarioConfig(
                        n_elements=n,
                        regime=regime,
                        trials=trials,
                        seed=seed,
                        power_grid_dbm=grid,
                        rate_target=1.0,
                    ),
                )
            )
    return _outage_rate_sweep(out_dir, "fig4a", configs, rate_target=1.0)


def _preset_fig4b(seed: int, trials: int, out_dir: Path) -> List[Path]:
    grid = tuple(range(0, 31, 2))
    wavelength = ScenarioConfig().wavelength
    r_source_50 = float(math.ceil(50 * wavelength / 2))
    configs = []
    for regime_label, regime in REGIME_LABELS:
        for n in (50, 100, 200):
            configs.append(
                (
                    "phase_free",
                    regime_label,
                    ScenarioConfig(
                        n_elements=n,
                        regime=regime,
                        trials=trials,
                        seed=seed,
                        power_grid_dbm=grid,
                        r_source_override=r_source_50,
                    ),
                )
            )
    return _outage_rate_sweep(out_dir, "fig4b", configs, rate_target=None)


def _three_scheme_configs(
    grid: Sequence[float],
    seed: int,
    trials: int,
    correlated: bool,
    kappa: Optional[float],
    rate_target: float,
) -> List[tuple]:
    regime = CorrelationRegime.SPATIALLY_CORRELATED if correlated else CorrelationRegime.IID
    regime_label = "correlated" if correlated else "iid"
    configs = []
    for label, scheme in SCHEME_LABELS:
        configs.append(
            (
                label,
                regime_label,
                ScenarioConfig(
                    n_elements=40,
                    regime=regime,
                    kappa=kappa,
                    scheme=scheme,
                    trials=trials,
                    seed=seed,
                    power_grid_dbm=tuple(grid),
                    rate_target=rate_target,
                ),
            )
        )
    return configs


def _preset_fig5a(seed: int, trials: int, out_dir: Path) -> List[Path]:
    configs = _three_scheme_configs(range(-24, 13, 2), seed, trials, False, None, 2.0)
    return _outage_rate_sweep(out_dir, "fig5a", configs, rate_target=2.0)


def _preset_fig5b(seed: int, trials: int, out_dir: Path) -> List[Path]:
    configs = _three_scheme_configs(range(-24, 17, 2), seed, trials, True, 0.0, 0.5)
    return _outage_rate_sweep(out_dir, "fig5b", configs, rate_target=0.5)


def _preset_fig6a(seed: int, trials: int, out_dir: Path) -> List[Path]:
    configs = _three_scheme_configs(range(-10, 31, 2), seed, trials, False, None, 1.0)
    return _outage_rate_sweep(out_dir, "fig6a", configs, rate_target=None)


def _preset_fig6b(seed: int, trials: int, out_dir: Path) -> List[Path]:
    configs = _three_scheme_configs(range(-10, 31, 2), seed, trials, True, 0.0, 1.0)
    return _outage_rate_sweep(out_dir, "fig6b", configs, rate_target=None)


def _rop_preset(n: int, seed: int, trials: int, out_dir: Path, stem: str) -> List[Path]:
    res = run_trials(ScenarioConfig(n_elements=n, trials=trials, seed=seed))
    st = activation_stats(res)
    p_sim = st.p_a_stage1
    thresholds = np.unique(np.round(np.linspace(0.40 * n, 0.60 * n, 20)).astype(int))
    rows = []
    for thr in thresholds:
        rows.append(
            (
                int(thr),
                st.rop_empirical(int(thr)),
                rop_lower(n, 0.5, int(thr)),
                rop_upper(n, 0.5, int(thr)),
                rop_lower(n, p_sim, int(thr)),
                rop_upper(n, p_sim, int(thr)),
            )
        )
    path = out_dir / f"{stem}_sim.csv"
    write_csv(
        path,
        (
            "n_thr",
            "rop_empirical",
            "rop_lower_asymptotic",
            "rop_upper_asymptotic",
            "rop_lower_simulated",
            "rop_upper_simulated",
        ),
        rows,
    )
    return [path]


def _preset_fig7a(seed: int, trials: int, out_dir: Path) -> List[Path]:
    return _rop_preset(100, seed, trials, out_dir, "fig7a")


def _preset_fig7b(seed: int, trials: int, out_dir: Path) -> List[Path]:
    return _rop_preset(5000, seed, trials, out_dir, "fig7b")


PRESETS: Dict[str, Callable[[int, int, Path], List[Path]]] = {
    "fig2b": _preset_fig2b,
    "fig3a": _preset_fig3a,
    "fig3b": _preset_fig3b,
    "fig4a": _preset_fig4a,
    "fig4b": _preset_fig4b,
    "fig5a": _preset_fig5a,
    "fig5b": _preset_fig5b,
    "fig6a": _preset_fig6a,
    "fig6b": _preset_fig6b,
    "fig7a": _preset_fig7a,
    "fig7b": _preset_fig7b,
}

DEFAULT_TRIALS: Dict[str, int] = {
    "fig2b": 2000,
    "fig3a": 2000,
    "fig3b": 20000,
    "fig4a": 4000,
    "fig4b": 4000,
    "fig5a": 10000,
    "fig5b": 10000,
    "fig6a": 4000,
    "fig6b": 4000,
    "fig7a": 10000,
    "fig7b": 10000,
}


def run_preset(name: str, seed: int, trials: Optional[int], out_dir: Path) -> List[Path]:
    """Execute one preset and return the written file paths."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset '{name}' (choose from {', '.join(sorted(PRESETS))})")
    actual_trials = trials if trials is not None else DEFAULT_TRIALS[name]
    return PRESETS[name](seed, actual_trials, Path(out_dir))
