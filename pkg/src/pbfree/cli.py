"""Command-line front end.

Subcommands
-----------
``run``     simulate one scenario described by a key=value config file and
            write per-power metrics as CSV.
``preset``  run a named figure preset (fig2b .. fig7b).
``theory``  print closed-form values (no simulation).

Config file format: one ``key=value`` per line, ``#`` starts a comment,
unknown keys are rejected.  Recognized keys and defaults::

    n_elements=40            carrier_freq_hz=1.8e9
    d_h_m=<wavelength/8>     d_v_m=<wavelength/8>
    regime=iid               (iid | correlated)
    kappa=<absent>           (absent = no phase errors; 0 = uniform errors)
    r_dest_m=10              noise_dbm=-90
    power_grid_dbm=0:5:30    (start:step:stop, or comma-separated values)
    rate_target_bpcu=1.0
    scheme=phase_free        (phase_free | classical_pb | rpsa)
    phase_levels=2           amplitude_coupling=true
    ideal_full_reflection=true
    trials=10000             seed=0
    r_source_override_m=<absent>

Exit codes: 0 success, 1 usage or config error, 2 runtime or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .beamforming import PbScheme, SchemeConfig
from .channel import CorrelationRegime, dbm_to_watts, link_budget
from .montecarlo import ScenarioConfig, estimate_outage, estimate_rate, run_trials
from .presets import PRESETS, format_cell, run_preset, write_csv
from .theory import (
    activation_prob_quadrature,
    fit_coefficients,
    outage_closed_form,
    rate_upper_bound,
    rop_lower,
    rop_upper,
)


class ConfigError(ValueError):
    pass


class _CliParser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_power_grid(text: str) -> Tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range syntax is start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        values = []
        value = start
        while value <= stop + 1e-9:
            values.append(round(value, 9))
            value += step
        return tuple(values)
    return tuple(float(p) for p in text.split(","))


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError("expected true or false")


_REGIMES = {"iid": CorrelationRegime.IID, "correlated": CorrelationRegime.SPATIALLY_CORRELATED}
_SCHEMES = {
    "phase_free": PbScheme.PHASE_FREE,
    "classical_pb": PbScheme.CLASSICAL,
    "rpsa": PbScheme.RPSA,
}

_CONFIG_PARSERS = {
    "n_elements": int,
    "carrier_freq_hz": float,
    "d_h_m": float,
    "d_v_m": float,
    "regime": lambda s: _REGIMES[s],
    "kappa": float,
    "r_dest_m": float,
    "noise_dbm": float,
    "power_grid_dbm": _parse_power_grid,
    "rate_target_bpcu": float,
    "scheme": lambda s: _SCHEMES[s],
    "phase_levels": int,
    "amplitude_coupling": _parse_bool,
    "ideal_full_reflection": _parse_bool,
    "trials": int,
    "seed": int,
    "r_source_override_m": float,
}


def parse_config(path) -> ScenarioConfig:
    """Read a flat key=value scenario file into a validated config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got '{stripped}'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
        try:
            raw[key] = _CONFIG_PARSERS[key](value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path}:{lineno}: invalid value for '{key}': {value}") from exc
    scheme = SchemeConfig(
        scheme=raw.pop("scheme", PbScheme.PHASE_FREE),
        phase_levels=raw.pop("phase_levels", 2),
        amplitude_coupling=raw.pop("amplitude_coupling", True),
        ideal_full_reflection=raw.pop("ideal_full_reflection", True),
    )
    rename = {
        "carrier_freq_hz": "carrier_freq",
        "d_h_m": "d_h",
        "d_v_m": "d_v",
        "r_dest_m": "r_dest",
        "rate_target_bpcu": "rate_target",
        "r_source_override_m": "r_source_override",
    }
    kwargs = {rename.get(k, k): v for k, v in raw.items()}
    try:
        return ScenarioConfig(scheme=scheme, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        try:
            config = ScenarioConfig(**{**config.__dict__, **overrides})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    result = run_trials(config)
    rows = []
    for p in config.power_grid_dbm:
        budget = result.budget(p)
        outage = estimate_outage(result.gains, budget, config.rate_target)
        rate = estimate_rate(result.gains, budget)
        rows.append(
            (
                p,
                outage.value,
                outage.std_error,
                rate.value,
                rate.std_error,
                float(result.n_active.mean()),
            )
        )
    out = Path(args.out) / "run.csv"
    write_csv(
        out,
        ("tx_power_dbm", "outage", "outage_std_error", "rate", "rate_std_error", "mean_n_active"),
        rows,
    )
    print(out)
    return 0


def _cmd_preset(args) -> int:
    paths = run_preset(args.name, seed=args.seed, trials=args.trials, out_dir=Path(args.out))
    for p in paths:
        print(p)
    return 0


def _print_table(header: Sequence[str], rows: Sequence[Sequence]) -> None:
    print(",".join(header))
    for row in rows:
        print(",".join(format_cell(v) for v in row))


def _cmd_theory(args) -> int:
    if args.subcommand == "pa-quadrature":
        quad = activation_prob_quadrature()
        _print_table(
            ("component", "value"),
            [
                ("p_a1", quad.p_a1),
                ("p_a2", quad.p_a2),
                ("p_a3", quad.p_a3),
                ("p_a4", quad.p_a4),
                ("p_geq", quad.p_geq),
                ("p_leq", quad.p_leq),
                ("p_c1_geq_c2", quad.p_c1_geq_c2),
                ("p_c1_leq_c2", quad.p_c1_leq_c2),
                ("p_a", quad.p_a),
            ],
        )
    elif args.subcommand == "rop":
        _print_table(
            ("n_thr", "rop_lower", "rop_upper"),
            [(args.nthr, rop_lower(args.n, args.pa, args.nthr), rop_upper(args.n, args.pa, args.nthr))],
        )
    elif args.subcommand == "outage":
        coeffs = fit_coefficients(_REGIMES[args.regime])
        rows = []
        for p in args.power_dbm_values:
            budget = link_budget(
                args.n,
                299_792_458.0 / args.carrier_freq_hz,
                args.r_dest_m,
                dbm_to_watts(p),
                dbm_to_watts(args.noise_dbm),
            )
            rows.append((p, outage_closed_form(args.rate, budget, args.n, coeffs)))
        _print_table(("tx_power_dbm", "outage"), rows)
    else:  # rate-bound
        coeffs = fit_coefficients(_REGIMES[args.regime])
        rows = []
        for p in args.power_dbm_values:
            budget = link_budget(
                args.n,
                299_792_458.0 / args.carrier_freq_hz,
                args.r_dest_m,
                dbm_to_watts(p),
                dbm_to_watts(args.noise_dbm),
            )
            rows.append((p, rate_upper_bound(budget, args.n, coeffs)))
        _print_table(("tx_power_dbm", "rate_upper_bound"), rows)
    return 0


def _build_parser() -> _CliParser:
    parser = _CliParser(prog="pbfree", description="Phase-shift-free RIS beamforming simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a scenario config file")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--trials", type=int, default=None)
    run_p.add_argument("--out", required=True)
    run_p.set_defaults(func=_cmd_run)

    preset_p = sub.add_parser("preset", help="run a named figure preset")
    preset_p.add_argument("name", choices=sorted(PRESETS))
    preset_p.add_argument("--seed", type=int, default=0)
    preset_p.add_argument("--trials", type=int, default=None)
    preset_p.add_argument("--out", required=True)
    preset_p.set_defaults(func=_cmd_preset)

    theory_p = sub.add_parser("theory", help="closed-form evaluations")
    theory_sub = theory_p.add_subparsers(dest="subcommand", required=True)

    quad_p = theory_sub.add_parser("pa-quadrature", help="activation-probability components")
    quad_p.set_defaults(func=_cmd_theory)

    rop_p = theory_sub.add_parser("rop", help="active-count outage bounds")
    rop_p.add_argument("--n", type=int, required=True)
    rop_p.add_argument("--pa", type=float, required=True)
    rop_p.add_argument("--nthr", type=int, required=True)
    rop_p.set_defaults(func=_cmd_theory)

    for name in ("outage", "rate-bound"):
        p = theory_sub.add_parser(name, help=f"closed-form {name.replace('-', ' ')}")
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--regime", choices=sorted(_REGIMES), default="iid")
        p.add_argument("--power-dbm", dest="power_dbm_values", type=float, nargs="+", required=True)
        p.add_argument("--noise-dbm", dest="noise_dbm", type=float, default=-90.0)
        p.add_argument("--r-dest-m", dest="r_dest_m", type=float, default=10.0)
        p.add_argument("--carrier-freq-hz", dest="carrier_freq_hz", type=float, default=1.8e9)
        if name == "outage":
            p.add_argument("--rate", type=float, required=True)
        p.set_defaults(func=_cmd_theory)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"pbfree: config error: {exc}", file=sys.stderr)
        return 1
    except (OSError, RuntimeError, ValueError, KeyError) as exc:
        print(f"pbfree: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
