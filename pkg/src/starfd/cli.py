"""Experiment runner: flat key-value configs in, CSV tables out.

An experiment file is plain text, one ``key = value`` pair per line, with
``#`` starting a comment line. Unset keys take the documented defaults
(the baseline cell at 30 dBW). Keys ending in ``_dbw`` are decibel-watts
and are converted to linear units at this boundary; everything downstream
works in linear units.

Every run writes ``<output>.manifest.txt`` next to the CSV: a complete,
re-runnable experiment file with all defaults materialized and the seed
recorded, so ``starfd run <manifest>`` reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .channel import GeometryAngles, StarRisState
from .config import SystemConfig, USERS
from .exceptions import InfeasibleError, NumericError
from .geometry import CellGeometry
from .optimize import (ObjectiveSpec, aligned_state, pgam,
                       power_allocation_closed_form)
from .presets import PRESET_NOTES, PRESETS, preset_text
from .rates_cf import (cf_rate_inputs, cf_rates, cf_report_bidirectional)
from .rates_mc import PowerConfig, RateReport, ergodic_rate_mc

__all__ = ["ExperimentSpec", "parse_spec_text", "run_experiment", "main"]

SWEEP_VARIABLES = ("snr_db", "n_elements", "tau", "xi", "beta",
                   "target_rate")
DESIGNS = ("pgam", "aligned", "random")
POWER_SCHEMES = ("fixed", "closed-form", "tau-dl-target")
ESTIMATORS = ("cf", "mc")

# The complete key set, in canonical (manifest) order: key -> (kind,
# default). Kinds: float | int | word | words | floats | str.
SPEC_KEYS: Dict[str, Tuple[str, str]] = {
    "scenario": ("word", "noma-pair"),
    "cell_radius_m": ("float", "50"),
    "edge_radius_m": ("float", "30"),
    "bs_surface_distance_m": ("float", "60"),
    "pathloss_exponent": ("float", "2.7"),
    "n_elements": ("int", "20"),
    "element_spacing_wavelengths": ("float", "0.5"),
    "az_br": ("float", "0.8"), "el_br": ("float", "1.1"),
    "az_u1d": ("float", "2.0"), "el_u1d": ("float", "1.3"),
    "az_u2d": ("float", "2.9"), "el_u2d": ("float", "0.7"),
    "az_u1u": ("float", "4.1"), "el_u1u": ("float", "1.0"),
    "az_u2u": ("float", "5.3"), "el_u2u": ("float", "1.5"),
    "kappa_br": ("float", "3"),
    "kappa_u1d": ("float", "3"), "kappa_u2d": ("float", "3"),
    "kappa_u1u": ("float", "3"), "kappa_u2u": ("float", "3"),
    "noise_dl_dbw": ("float", "0"),
    "noise_bs_dbw": ("float", "0"),
    "total_power_dbw": ("float", "30"),
    "tau": ("float", "0.8"),
    "alpha1": ("float", "0.2"),
    "alpha2": ("float", "0.8"),
    "ul_split": ("float", "0.5"),
    "sic_residual": ("float", "0"),
    "si_beta": ("float", "0"),
    "si_exponent": ("float", "1"),
    "weight_u1d": ("float", "0.8"), "weight_u2d": ("float", "0.8"),
    "weight_u1u": ("float", "0.8"), "weight_u2u": ("float", "0.8"),
    "target_dl_rate": ("float", "0"),
    "target_ul_rate": ("float", "0"),
    "sweep_variable": ("word", ""),
    "sweep_grid": ("floats", ""),
    "designs": ("words", "aligned"),
    "power_scheme": ("word", "fixed"),
    "estimators": ("words", "cf"),
    "dl_target_cases": ("floats", ""),
    "trials": ("int", "100000"),
    "seed": ("int", "2026"),
    "pgam_mu": ("float", "0.5"),
    "pgam_alpha_scale": ("float", "1"),
    "pgam_eps": ("float", "1e-9"),
    "pgam_iters": ("int", "500"),
    "output": ("str", "results.csv"),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully resolved, validated experiment definition."""

    config: SystemConfig
    scenario: str
    sweep_variable: str
    grid: Tuple[float, ...]
    designs: Tuple[str, ...]
    power_scheme: str
    estimators: Tuple[str, ...]
    trials: int
    seed: int
    output: str
    dl_target_cases: Tuple[float, ...]
    pgam_mu: float
    pgam_alpha_scale: float
    pgam_eps: float
    pgam_iters: int
    resolved: Dict[str, str]


def _parse_scalar(kind: str, raw: str):
    if kind == "float":
        return float(raw)
    if kind == "int":
        value = int(raw)
        return value
    if kind == "floats":
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    if kind == "words":
        return tuple(raw.replace(",", " ").split())
    return raw


def parse_spec_text(text: str
                    ) -> Tuple[Optional[ExperimentSpec], List[str]]:
    """Parse an experiment file, collecting every problem found.

    Returns ``(spec, [])`` on success or ``(None, errors)`` where each
    error names the offending key.
    """
    errors: List[str] = []
    raw = {key: default for key, (_, default) in SPEC_KEYS.items()}
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got "
                          f"{stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in SPEC_KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in seen:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        seen.add(key)
        raw[key] = value

    values: Dict[str, object] = {}
    for key, (kind, _) in SPEC_KEYS.items():
        try:
            values[key] = _parse_scalar(kind, raw[key])
        except ValueError:
            errors.append(f"{key}: cannot parse {raw[key]!r} as {kind}")
    if errors:
        return None, errors

    # Enumerated keys. "target-rate" is accepted as a spelling of the
    # target_rate sweep to match the hyphenated scheme names.
    scenario = values["scenario"]
    if scenario not in ("noma-pair", "bidirectional"):
        errors.append(f"scenario: must be noma-pair or bidirectional, "
                      f"got {scenario!r}")
    sweep_variable = values["sweep_variable"]
    if sweep_variable == "target-rate":
        sweep_variable = "target_rate"
    if not sweep_variable:
        errors.append("sweep_variable: required (one of "
                      + ", ".join(SWEEP_VARIABLES) + ")")
    elif sweep_variable not in SWEEP_VARIABLES:
        errors.append(f"sweep_variable: unknown value {sweep_variable!r}")
    scheme = values["power_scheme"]
    if scheme not in POWER_SCHEMES:
        errors.append(f"power_scheme: unknown value {scheme!r}")
    designs = values["designs"]
    for design in designs:
        if design not in DESIGNS:
            errors.append(f"designs: unknown design {design!r}")
    if not designs:
        errors.append("designs: need at least one")
    estimators = values["estimators"]
    for estimator in estimators:
        if estimator not in ESTIMATORS:
            errors.append(f"estimators: unknown estimator {estimator!r}")
    if not estimators:
        errors.append("estimators: need at least one")

    grid = values["sweep_grid"]
    if not grid:
        errors.append("sweep_grid: must be non-empty")
    elif any(b <= a for a, b in zip(grid, grid[1:])):
        errors.append("sweep_grid: values must be strictly increasing")
    if values["trials"] < 1 and "mc" in estimators:
        errors.append("trials: must be >= 1 when the mc estimator is "
                      "requested")
    if values["seed"] < 0:
        errors.append("seed: must be non-negative")
    if values["pgam_iters"] < 1:
        errors.append("pgam_iters: must be >= 1")
    if values["pgam_mu"] <= 0 or values["pgam_eps"] <= 0:
        errors.append("pgam_mu/pgam_eps: must be positive")
    if values["pgam_alpha_scale"] <= 0:
        errors.append("pgam_alpha_scale: must be positive")
    if not values["output"]:
        errors.append("output: must be a file name")

    # Sweep-specific domain rules.
    if grid and sweep_variable == "tau":
        if any(not 0.0 < v <= 1.0 for v in grid):
            errors.append(
                "sweep_grid: tau values must lie in (0, 1]; an "
                "uplink-only split is modeled as a small positive tau "
                "such as 0.01")
    if grid and sweep_variable == "n_elements":
        if any(v != int(v) or v < 1 for v in grid):
            errors.append("sweep_grid: n_elements values must be "
                          "positive integers")
    if grid and sweep_variable == "xi":
        if any(not 0.0 <= v <= 1.0 for v in grid):
            errors.append("sweep_grid: xi values must lie in [0, 1]")
    if grid and sweep_variable == "beta":
        if any(v < 0.0 for v in grid):
            errors.append("sweep_grid: beta values must be non-negative")
    if grid and sweep_variable == "target_rate":
        if any(v < 0.0 for v in grid):
            errors.append("sweep_grid: target rates must be non-negative")

    # Scheme/scenario compatibility.
    if scenario == "bidirectional" and scheme != "fixed":
        errors.append("power_scheme: the bidirectional scenario supports "
                      "only fixed splits (rate targets are defined for "
                      "the noma-pair scenario)")
    if scheme == "tau-dl-target" and sweep_variable != "tau":
        errors.append("power_scheme: tau-dl-target applies only to tau "
                      "sweeps")
    if sweep_variable == "target_rate" and scheme != "closed-form":
        errors.append("sweep_variable: a target_rate sweep needs "
                      "power_scheme = closed-form")
    if values["dl_target_cases"] and scheme != "tau-dl-target":
        errors.append("dl_target_cases: only meaningful with "
                      "power_scheme = tau-dl-target")

    config = None
    try:
        angles = GeometryAngles(
            az_br=values["az_br"], el_br=values["el_br"],
            az_u1d=values["az_u1d"], el_u1d=values["el_u1d"],
            az_u2d=values["az_u2d"], el_u2d=values["el_u2d"],
            az_u1u=values["az_u1u"], el_u1u=values["el_u1u"],
            az_u2u=values["az_u2u"], el_u2u=values["el_u2u"],
            d_over_lambda=values["element_spacing_wavelengths"])
        geometry = CellGeometry(R=values["cell_radius_m"],
                                R_r=values["edge_radius_m"],
                                d_br=values["bs_surface_distance_m"],
                                m=values["pathloss_exponent"])
        config = SystemConfig(
            geometry=geometry, n_elements=values["n_elements"],
            angles=angles,
            kappa_br=values["kappa_br"], kappa_u1d=values["kappa_u1d"],
            kappa_u2d=values["kappa_u2d"], kappa_u1u=values["kappa_u1u"],
            kappa_u2u=values["kappa_u2u"],
            sigma_sq=10.0 ** (values["noise_dl_dbw"] / 10.0),
            sigma_b_sq=10.0 ** (values["noise_bs_dbw"] / 10.0),
            weight_u1d=values["weight_u1d"],
            weight_u2d=values["weight_u2d"],
            weight_u1u=values["weight_u1u"],
            weight_u2u=values["weight_u2u"],
            P_t=10.0 ** (values["total_power_dbw"] / 10.0),
            tau=values["tau"], alpha1=values["alpha1"],
            alpha2=values["alpha2"], ul_split=values["ul_split"],
            Xi=values["sic_residual"], beta=values["si_beta"],
            si_lambda=values["si_exponent"],
            R_dth=values["target_dl_rate"],
            R_uth=values["target_ul_rate"])
    except ValueError as exc:
        errors.append(str(exc))

    if errors:
        return None, errors

    cases = values["dl_target_cases"]
    if scheme == "tau-dl-target" and not cases:
        cases = (values["target_dl_rate"],)

    spec = ExperimentSpec(
        config=config, scenario=scenario, sweep_variable=sweep_variable,
        grid=grid, designs=designs, power_scheme=scheme,
        estimators=estimators, trials=values["trials"],
        seed=values["seed"], output=values["output"],
        dl_target_cases=cases, pgam_mu=values["pgam_mu"],
        pgam_alpha_scale=values["pgam_alpha_scale"],
        pgam_eps=values["pgam_eps"], pgam_iters=values["pgam_iters"],
        resolved=dict(raw))
    return spec, []


def _config_for_point(spec: ExperimentSpec, value: float) -> SystemConfig:
    config = spec.config
    variable = spec.sweep_variable
    if variable == "snr_db":
        return replace(config,
                       P_t=config.sigma_sq * 10.0 ** (value / 10.0))
    if variable == "n_elements":
        return replace(config, n_elements=int(value))
    if variable == "tau":
        return replace(config, tau=value)
    if variable == "xi":
        return replace(config, Xi=value)
    if variable == "beta":
        return replace(config, beta=value)
    return replace(config, R_dth=value)


def _design_state(spec: ExperimentSpec, config: SystemConfig,
                  pw0: PowerConfig, point: int,
                  design_index: int) -> StarRisState:
    design = spec.designs[design_index]
    if design == "aligned":
        return aligned_state(config, 0.5, pw0, spec.scenario)
    if design == "random":
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=spec.seed, spawn_key=(point, design_index, 1)))
        return StarRisState.random_phases(config.n_elements, 0.5, rng)
    init = aligned_state(config, 0.5, pw0, spec.scenario)
    objective = ObjectiveSpec.from_config(config, spec.scenario)
    result = pgam(config, pw0, init, mu=spec.pgam_mu,
                  alpha_scale=spec.pgam_alpha_scale, eps=spec.pgam_eps,
                  L=spec.pgam_iters, objective=objective)
    return result.state


def _mc_seed(spec: ExperimentSpec, point: int, design_index: int,
             case_index: int) -> int:
    seq = np.random.SeedSequence(
        entropy=spec.seed, spawn_key=(point, design_index, case_index, 0))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _tau_split_powers(config: SystemConfig, inputs, R_dth: float,
                      R_uth: float) -> Tuple[PowerConfig, bool]:
    """Fixed tau split whose BS share is divided to hit the DL target.

    The edge-signal power p_b2 is the smallest value for which the edge
    user decodes its own signal at the DL target rate (the target is the
    edge user's rate cap); the remaining BS power carries the center
    signal. When even the whole BS budget falls short, everything goes
    to the edge signal and the point is flagged infeasible. The uplink
    side keeps the configured split, so the UL target and the center
    user's decoding order only enter diagnostics, not the split rule.
    """
    p_b = config.tau * config.P_t
    p_u = (1.0 - config.tau) * config.P_t
    p_u1u = config.ul_split * p_u
    p_u2u = p_u - p_u1u
    gamma_d = 2.0 ** R_dth - 1.0
    feasible = True

    required = 0.0
    edge = inputs["u2d"]
    if gamma_d > 0.0:
        interference = (p_u1u * edge.y1 + p_u2u * edge.y2
                        + config.sigma_sq)
        if edge.x1 <= 0.0:
            required, feasible = p_b, False
        else:
            required = (gamma_d * (p_b * edge.x1 + interference)
                        / (edge.x1 * (1.0 + gamma_d)))
    p_b2 = required
    if p_b2 > p_b:
        p_b2, feasible = p_b, False
    p_b1 = p_b - p_b2

    pw = PowerConfig(P_t=config.P_t, p_b1=p_b1, p_b2=p_b2,
                     p_u1u=p_u1u, p_u2u=p_u2u, Xi=config.Xi,
                     beta=config.beta, si_lambda=config.si_lambda,
                     R_dth=R_dth, R_uth=R_uth)
    if R_uth > 0.0:
        u2u = inputs["u2u"]
        sinr = (p_u2u * u2u.x1
                / (config.Xi * p_u1u * u2u.y1 + p_b * u2u.y2 + pw.V
                   + config.sigma_b_sq))
        feasible = feasible and math.log2(1.0 + sinr) >= R_uth - 1e-12
    return pw, feasible


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv_header(spec: ExperimentSpec) -> List[str]:
    head = [spec.sweep_variable, "design"]
    if spec.power_scheme == "tau-dl-target":
        head += ["target_dl", "feasible"]
    head.append("estimator")
    if spec.scenario == "bidirectional":
        return head + ["R_c", "R_e", "sum", "stderr_c", "stderr_e"]
    return head + ["R_u1d", "R_u2d", "R_u1u", "R_u2u", "sum",
                   "stderr_u1d", "stderr_u2d", "stderr_u1u",
                   "stderr_u2u"]


def _report_cells(spec: ExperimentSpec, report: RateReport) -> List[str]:
    names = ("c", "e") if spec.scenario == "bidirectional" else USERS
    cells = [_fmt(report.rate(name)) for name in names]
    cells.append(_fmt(report.sum_rate))
    stderr = report.stderr or {}
    cells += [_fmt(stderr[name]) if name in stderr else ""
              for name in names]
    return cells


def _point_rows(spec: ExperimentSpec, point: int,
                value: float) -> List[List[str]]:
    config = _config_for_point(spec, value)
    if spec.sweep_variable == "n_elements":
        sweep_cell = str(int(value))
    else:
        sweep_cell = _fmt(value)
    cases = (spec.dl_target_cases
             if spec.power_scheme == "tau-dl-target" else (None,))

    rows: List[List[str]] = []
    for j, design in enumerate(spec.designs):
        pw0 = PowerConfig.from_config(config)
        state = _design_state(spec, config, pw0, point, j)
        for k, case in enumerate(cases):
            if spec.power_scheme == "fixed":
                pw, feasible = pw0, None
            elif spec.power_scheme == "closed-form":
                pw = power_allocation_closed_form(
                    config, state, None, config.P_t, config.R_dth,
                    config.R_uth)
                feasible = None
            else:
                inputs = cf_rate_inputs(config, state)
                pw, feasible = _tau_split_powers(config, inputs, case,
                                                 config.R_uth)
            lead = [sweep_cell, design]
            if spec.power_scheme == "tau-dl-target":
                lead += [_fmt(case), "true" if feasible else "false"]
            for estimator in spec.estimators:
                if estimator == "cf":
                    if spec.scenario == "bidirectional":
                        report = cf_report_bidirectional(config, state,
                                                         pw)
                    else:
                        report = cf_rates(config, state, pw)
                else:
                    report = ergodic_rate_mc(
                        config, state, pw, spec.trials,
                        _mc_seed(spec, point, j, k), spec.scenario)
                rows.append(lead + [estimator]
                            + _report_cells(spec, report))
    return rows


def _manifest_text(spec: ExperimentSpec) -> str:
    lines = [f"# run manifest ({__version__}); re-run with: "
             "starfd run <this file>"]
    lines += [f"{key} = {spec.resolved[key]}" for key in SPEC_KEYS]
    return "\n".join(lines) + "\n"


def _summary_lines(spec: ExperimentSpec, header: List[str],
                   rows: List[List[str]]) -> List[str]:
    """Argmax-tau report: best split per (design, target, estimator)."""
    sweep_col = header.index(spec.sweep_variable)
    sum_col = header.index("sum")
    series: Dict[Tuple[str, ...], Tuple[float, float]] = {}
    label_cols = [i for i, name in enumerate(header)
                  if name in ("design", "target_dl", "estimator")]
    for row in rows:
        key = tuple(f"{header[i]}={row[i]}" for i in label_cols)
        tau, total = float(row[sweep_col]), float(row[sum_col])
        if key not in series or total > series[key][1]:
            series[key] = (tau, total)
    return [f"{' '.join(key)}: argmax tau = {_fmt(tau)} "
            f"(sum rate {_fmt(total)} bits/s/Hz)"
            for key, (tau, total) in series.items()]


def run_experiment(spec: ExperimentSpec, jobs: int = 1
                   ) -> Tuple[Path, Path, Optional[Path]]:
    """Execute a validated spec; returns (csv, manifest, summary) paths.

    Grid points run concurrently under ``jobs`` workers; rows are
    buffered and written in grid order, and all randomness is derived
    from the seed and the grid position, so the CSV is identical at any
    parallelism level. Nothing is written until every point succeeded.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if jobs == 1:
        per_point = [_point_rows(spec, i, v)
                     for i, v in enumerate(spec.grid)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_point = list(pool.map(_point_rows,
                                      [spec] * len(spec.grid),
                                      range(len(spec.grid)), spec.grid))

    header = _csv_header(spec)
    out_path = Path(spec.output)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for rows in per_point:
            for row in rows:
                fh.write(",".join(row) + "\n")

    manifest_path = Path(str(out_path) + ".manifest.txt")
    manifest_path.write_text(_manifest_text(spec), encoding="utf-8")

    summary_path = None
    if spec.sweep_variable == "tau":
        flat = [row for rows in per_point for row in rows]
        summary_path = Path(str(out_path) + ".summary.txt")
        summary_path.write_text(
            "\n".join(_summary_lines(spec, header, flat)) + "\n",
            encoding="utf-8")
    return out_path, manifest_path, summary_path


def _load_spec_argument(name: str) -> Tuple[Optional[str], Optional[str]]:
    """Resolve a CLI spec argument to file text: path first, then preset."""
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8"), None
    if name in PRESETS:
        return preset_text(name), None
    return None, (f"{name!r} is neither an experiment file nor a preset "
                  f"(presets: {', '.join(sorted(PRESETS))})")


def _cmd_run(args: argparse.Namespace) -> int:
    text, problem = _load_spec_argument(args.spec)
    if problem:
        print(f"error: {problem}", file=sys.stderr)
        return 1
    spec, errors = parse_spec_text(text)
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 1
    if args.output:
        resolved = dict(spec.resolved)
        resolved["output"] = args.output
        spec = replace(spec, output=args.output, resolved=resolved)
    try:
        out_path, manifest_path, summary_path = run_experiment(
            spec, jobs=args.jobs)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    except (InfeasibleError, NumericError, ArithmeticError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out_path}")
    print(f"wrote {manifest_path}")
    if summary_path is not None:
        print(f"wrote {summary_path}")
        for line in summary_path.read_text(encoding="utf-8").splitlines():
            print(line)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    text, problem = _load_spec_argument(args.spec)
    if problem:
        print(f"error: {problem}", file=sys.stderr)
        return 1
    spec, errors = parse_spec_text(text)
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(_manifest_text(spec))
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.presets_cmd == "show":
        try:
            sys.stdout.write(preset_text(args.name))
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 1
        return 0
    width = max(len(name) for name in PRESETS)
    for name in PRESETS:
        print(f"{name:<{width}}  {PRESET_NOTES[name]}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="starfd",
        description="Surface-assisted full-duplex NOMA experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment file or "
                                       "preset and write its CSV")
    p_run.add_argument("spec", help="experiment file path or preset name")
    p_run.add_argument("--output", help="override the CSV output path")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="concurrent grid points (default 1)")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate",
                           help="check an experiment file and print the "
                                "resolved configuration")
    p_val.add_argument("spec", help="experiment file path or preset name")
    p_val.set_defaults(func=_cmd_validate)

    p_pre = sub.add_parser("presets", help="list or show bundled presets")
    pre_sub = p_pre.add_subparsers(dest="presets_cmd", required=True)
    pre_sub.add_parser("list", help="list preset names")
    p_show = pre_sub.add_parser("show", help="print one preset file")
    p_show.add_argument("name")
    p_pre.set_defaults(func=_cmd_presets)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
