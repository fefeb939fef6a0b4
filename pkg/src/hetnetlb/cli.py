"""Command-line front end: parse configs, run experiments, emit CSV.

Output files (all '\n'-terminated, numbers at 6 significant digits):

  samples.csv   policy,bias_db,eta,variant,tier,range_expanded,rate_bps
  summary.csv   experiment,policy,bias_db,eta,objective_kind,objective_value,is_argmax
  sweep*.csv    bias_db,eta,objective_value

Every output is a pure function of (config bytes, flags, seed).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import mc
from .assoc import PolicyTag
from .loadopt import SolverParams
from .mc import Objective, TrendMode
from .netgen import DegenerateScenario
from .scenario import (ConfigError, ScenarioConfig, Variant, linear_to_db,
                       out_of_band_scenario, reference_scenario, to_raw, validate)

_POLICIES = {
    "max-power": PolicyTag.MAX_POWER,
    "max-sinr": PolicyTag.MAX_SINR,
    "biased": PolicyTag.BIASED,
    "load-aware": PolicyTag.LOAD_AWARE,
}
_OBJECTIVES = {"pct5": Objective.PCT5, "pct50": Objective.PCT50,
               "mean_log": Objective.MEAN_LOG}
_VARIANTS = {"re_only_in_blank": Variant.RE_ONLY_IN_BLANK,
             "all_subframes": Variant.ALL_SUBFRAMES}
_PRESETS = ("fig2", "fig3", "fig5", "fig6", "table1")


def parse_config_file(path: str) -> dict:
    """Sectioned key = value text -> {section: {key: str}}; '#' comments allowed."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case
    with open(path) as fh:
        parser.read_file(fh, source=path)
    return {name: dict(parser.items(name)) for name in parser.sections()}


def config_text(scenario: ScenarioConfig, extra_sections: Optional[dict] = None) -> str:
    """Render a scenario (plus optional solver/mc sections) as config text."""
    raw = to_raw(scenario)
    if extra_sections:
        raw.update(extra_sections)
    lines = []
    for section, entries in raw.items():
        lines.append(f"[{section}]")
        for key, value in entries.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _parse_grid(text: str) -> list[float]:
    """'start:stop:step' (inclusive) or comma-separated values."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        n = int(round((stop - start) / step)) + 1
        return [start + i * step for i in range(n)]
    return [float(v) for v in text.split(",")]


def _small_cell_bias_db(scenario: ScenarioConfig) -> float:
    for tier in scenario.tiers:
        if not tier.is_macro:
            return linear_to_db(tier.bias)
    return 0.0


def _solver_from_config(raw: dict) -> Optional[SolverParams]:
    section = raw.get("solver")
    if not section:
        return None
    return SolverParams(step0=float(section.get("step0", 1.0)),
                        max_iters=int(section.get("max_iters", 300)),
                        gap_tol=float(section.get("gap_tol", 1e-2)))


def _mc_settings(raw: dict, args) -> dict:
    section = raw.get("mc", {}) if raw else {}
    realizations = args.realizations or int(section.get("realizations", 50))
    workers = (args.workers
               or int(os.environ.get("HETNET_LB_WORKERS", 0))
               or int(section.get("workers", 1)))
    objective_name = getattr(args, "objective", None) or section.get("objective", "pct50")
    if objective_name not in _OBJECTIVES:
        raise ConfigError("mc.objective", f"unknown objective {objective_name!r}")
    bias_grid = _parse_grid(getattr(args, "bias_grid", None)
                            or section.get("bias_grid_db", "0:30:1"))
    eta_grid = _parse_grid(getattr(args, "eta_grid", None)
                           or section.get("eta_grid", "0:0.9:0.1"))
    return {"realizations": realizations, "workers": workers,
            "objective": _OBJECTIVES[objective_name],
            "bias_grid": bias_grid, "eta_grid": eta_grid}


def _samples_rows(scenario, policy_name: str, detail, bias_db: float, eta: float,
                  variant: Variant):
    for rate, tier, re in zip(detail.rates, detail.tier_id, detail.range_expanded):
        yield (policy_name, bias_db, eta, variant.value, int(tier), bool(re), float(rate))


def _cmd_run(args) -> int:
    raw = parse_config_file(args.config)
    scenario = validate(raw)
    settings = _mc_settings(raw, args)
    policy = _POLICIES[args.policy]
    detail = mc.run_ensemble_detail(scenario, policy, settings["realizations"],
                                    args.seed, workers=settings["workers"],
                                    solver_params=_solver_from_config(raw))
    bias_db = _small_cell_bias_db(scenario)
    eta = scenario.blanking.eta
    variant = scenario.blanking.variant
    objective = settings["objective"]
    value = objective.evaluate(detail.rates)

    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "samples.csv"),
               ["policy", "bias_db", "eta", "variant", "tier", "range_expanded", "rate_bps"],
               _samples_rows(scenario, args.policy, detail, bias_db, eta, variant))
    _write_csv(os.path.join(args.out, "summary.csv"),
               ["experiment", "policy", "bias_db", "eta", "objective_kind",
                "objective_value", "is_argmax"],
               [("run", args.policy, bias_db, eta, objective.value, value, False)])
    print(f"run: policy={args.policy} {objective.value}={_fmt(value)} "
          f"bias={_fmt(bias_db)} dB eta={_fmt(eta)}")
    return 0


def _sweep_rows(result: mc.SweepResult):
    for i, bias in enumerate(result.bias_grid_db):
        for j, eta in enumerate(result.eta_grid):
            yield (bias, eta, float(result.values[i, j]))


def _cmd_sweep_bias(args) -> int:
    raw = parse_config_file(args.config)
    scenario = validate(raw)
    settings = _mc_settings(raw, args)
    result = mc.sweep_bias(scenario, settings["bias_grid"], settings["objective"],
                           settings["realizations"], args.seed, settings["workers"])
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "sweep.csv"),
               ["bias_db", "eta", "objective_value"], _sweep_rows(result))
    _write_csv(os.path.join(args.out, "summary.csv"),
               ["experiment", "policy", "bias_db", "eta", "objective_kind",
                "objective_value", "is_argmax"],
               [("sweep-bias", "biased", result.best_bias_db, result.best_eta,
                 result.objective.value, result.best_value, True)])
    print(f"sweep-bias: {result.objective.value}={_fmt(result.best_value)} "
          f"argmax bias={_fmt(result.best_bias_db)} dB")
    return 0


def _cmd_sweep_blanking(args) -> int:
    raw = parse_config_file(args.config)
    scenario = validate(raw)
    settings = _mc_settings(raw, args)
    variant = _VARIANTS[args.variant]
    result = mc.sweep_blanking(scenario, settings["bias_grid"], settings["eta_grid"],
                               variant, settings["objective"],
                               settings["realizations"], args.seed, settings["workers"])
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "sweep.csv"),
               ["bias_db", "eta", "objective_value"], _sweep_rows(result))
    rows = [("sweep-blanking", "biased", result.best_bias_db, result.best_eta,
             result.objective.value, result.best_value, True)]
    for j, eta in enumerate(result.eta_grid):
        best_i = int(np.argmax(result.values[:, j]))
        rows.append((f"sweep-blanking_eta_{_fmt(float(eta))}", "biased",
                     result.bias_grid_db[best_i], eta, result.objective.value,
                     float(result.values[best_i, j]), False))
    _write_csv(os.path.join(args.out, "summary.csv"),
               ["experiment", "policy", "bias_db", "eta", "objective_kind",
                "objective_value", "is_argmax"], rows)
    print(f"sweep-blanking[{variant.value}]: {result.objective.value}="
          f"{_fmt(result.best_value)} argmax bias={_fmt(result.best_bias_db)} dB "
          f"eta={_fmt(result.best_eta)}")
    return 0


def _cmd_trend(args) -> int:
    raw = parse_config_file(args.config)
    scenario = validate(raw)
    settings = _mc_settings(raw, args)
    mode = TrendMode(args.mode)
    ratios = [float(r) for r in args.ratios.split(",")]
    points = mc.density_trend(scenario, ratios, mode, settings["objective"],
                              settings["realizations"], args.seed,
                              settings["workers"], settings["bias_grid"],
                              settings["eta_grid"])
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for p in points:
        rows.append((f"trend_{mode.value}_ratio_{_fmt(p.ratio)}", "biased",
                     p.best_bias_db, p.best_eta if p.best_eta is not None else 0.0,
                     settings["objective"].value, p.objective_value, True))
        print(f"trend[{mode.value}] ratio={_fmt(p.ratio)}: "
              f"best bias={_fmt(p.best_bias_db)} dB"
              + (f" eta={_fmt(p.best_eta)}" if p.best_eta is not None else "")
              + f" {settings['objective'].value}={_fmt(p.objective_value)}")
    _write_csv(os.path.join(args.out, "summary.csv"),
               ["experiment", "policy", "bias_db", "eta", "objective_kind",
                "objective_value", "is_argmax"], rows)
    return 0


def _preset_fig2(args, settings) -> list:
    scenario = reference_scenario()
    cre = scenario.with_small_cell_bias_db(6.0)
    sample_rows, summary = [], []
    for name, policy, scen in (("max-power", PolicyTag.MAX_POWER, scenario),
                               ("max-sinr", PolicyTag.MAX_SINR, scenario),
                               ("biased", PolicyTag.BIASED, cre),
                               ("load-aware", PolicyTag.LOAD_AWARE, scenario)):
        detail = mc.run_ensemble_detail(scen, policy, settings["realizations"],
                                        args.seed, settings["workers"])
        bias_db = _small_cell_bias_db(scen)
        sample_rows.extend(_samples_rows(scen, name, detail, bias_db, 0.0, Variant.OFF))
        for objective in (Objective.PCT5, Objective.PCT50):
            value = objective.evaluate(detail.rates)
            summary.append(("fig2", name, bias_db, 0.0, objective.value, value, False))
            print(f"fig2: policy={name} {objective.value}={_fmt(value)}")
    _write_csv(os.path.join(args.out, "samples.csv"),
               ["policy", "bias_db", "eta", "variant", "tier", "range_expanded",
                "rate_bps"], sample_rows)
    return summary


def _preset_fig3(args, settings) -> list:
    summary = []
    for ratio in (2.0, 5.0, 10.0):
        scenario = out_of_band_scenario(small_cell_density_per_km2=ratio)
        result = mc.sweep_bias(scenario, settings["bias_grid"], Objective.PCT5,
                               settings["realizations"], args.seed, settings["workers"])
        _write_csv(os.path.join(args.out, f"sweep_ratio_{_fmt(ratio)}.csv"),
                   ["bias_db", "eta", "objective_value"], _sweep_rows(result))
        summary.append((f"fig3_ratio_{_fmt(ratio)}", "biased", result.best_bias_db,
                        0.0, "pct5", result.best_value, True))
        print(f"fig3 ratio={_fmt(ratio)}: best bias={_fmt(result.best_bias_db)} dB "
              f"pct5={_fmt(result.best_value)}")
    return summary


def _preset_fig5(args, settings) -> list:
    scenario = reference_scenario()
    result = mc.sweep_blanking(scenario, settings["bias_grid"], settings["eta_grid"],
                               Variant.RE_ONLY_IN_BLANK, Objective.PCT50,
                               settings["realizations"], args.seed, settings["workers"])
    _write_csv(os.path.join(args.out, "sweep.csv"),
               ["bias_db", "eta", "objective_value"], _sweep_rows(result))
    summary = [("fig5", "biased", result.best_bias_db, result.best_eta, "pct50",
                result.best_value, True)]
    for j, eta in enumerate(result.eta_grid):
        best_i = int(np.argmax(result.values[:, j]))
        summary.append((f"fig5_eta_{_fmt(float(eta))}", "biased",
                        result.bias_grid_db[best_i], eta, "pct50",
                        float(result.values[best_i, j]), False))
    print(f"fig5: best bias={_fmt(result.best_bias_db)} dB eta={_fmt(result.best_eta)} "
          f"pct50={_fmt(result.best_value)}")
    return summary


def _preset_fig6(args, settings) -> list:
    summary = []
    for ratio in (2.0, 5.0, 10.0):
        scenario = reference_scenario(small_cell_density_per_km2=ratio)
        result = mc.sweep_blanking(scenario, settings["bias_grid"], settings["eta_grid"],
                                   Variant.ALL_SUBFRAMES, Objective.PCT50,
                                   settings["realizations"], args.seed,
                                   settings["workers"])
        summary.append((f"fig6_ratio_{_fmt(ratio)}", "biased", result.best_bias_db,
                        result.best_eta, "pct50", result.best_value, True))
        print(f"fig6 ratio={_fmt(ratio)}: best eta={_fmt(result.best_eta)} "
              f"bias={_fmt(result.best_bias_db)} dB")
    return summary


def _preset_table1(args, settings) -> list:
    summary = []
    ref = reference_scenario()

    in_band = mc.sweep_bias(ref, settings["bias_grid"], Objective.PCT50,
                            settings["realizations"], args.seed, settings["workers"])
    _write_csv(os.path.join(args.out, "sweep_in_band.csv"),
               ["bias_db", "eta", "objective_value"], _sweep_rows(in_band))
    summary.append(("in_band", "biased", in_band.best_bias_db, 0.0, "pct50",
                    in_band.best_value, True))

    blanked = mc.sweep_blanking(ref, settings["bias_grid"], settings["eta_grid"],
                                Variant.RE_ONLY_IN_BLANK, Objective.PCT50,
                                settings["realizations"], args.seed, settings["workers"])
    _write_csv(os.path.join(args.out, "sweep_in_band_blank.csv"),
               ["bias_db", "eta", "objective_value"], _sweep_rows(blanked))
    summary.append(("in_band_blank", "biased", blanked.best_bias_db, blanked.best_eta,
                    "pct50", blanked.best_value, True))

    oob = mc.sweep_bias(out_of_band_scenario(), settings["bias_grid"], Objective.PCT5,
                        settings["realizations"], args.seed, settings["workers"])
    _write_csv(os.path.join(args.out, "sweep_out_of_band.csv"),
               ["bias_db", "eta", "objective_value"], _sweep_rows(oob))
    summary.append(("out_of_band", "biased", oob.best_bias_db, 0.0, "pct5",
                    oob.best_value, True))

    for row in summary:
        print(f"table1 {row[0]}: best bias={_fmt(row[2])} dB eta={_fmt(row[3])} "
              f"{row[4]}={_fmt(row[5])}")
    return summary


def _cmd_preset(args) -> int:
    if args.name not in _PRESETS:
        print(f"unknown preset: {args.name!r} (expected one of {', '.join(_PRESETS)})",
              file=sys.stderr)
        return 2
    settings = _mc_settings({}, args)
    os.makedirs(args.out, exist_ok=True)
    runner = {"fig2": _preset_fig2, "fig3": _preset_fig3, "fig5": _preset_fig5,
              "fig6": _preset_fig6, "table1": _preset_table1}[args.name]
    summary = runner(args, settings)
    _write_csv(os.path.join(args.out, "summary.csv"),
               ["experiment", "policy", "bias_db", "eta", "objective_kind",
                "objective_value", "is_argmax"], summary)
    return 0


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    if config_required:
        parser.add_argument("--config", required=True, help="scenario config file")
    parser.add_argument("--out", default="./out", help="output directory")
    parser.add_argument("--seed", type=int, default=1, help="master seed")
    parser.add_argument("--realizations", type=int, default=None,
                        help="Monte Carlo realizations (overrides [mc])")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel workers (or HETNET_LB_WORKERS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetnet-lb",
                                     description="HetNet load-balancing experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one ensemble under a fixed policy")
    _add_common(p)
    p.add_argument("--policy", choices=sorted(_POLICIES), default="biased")
    p.add_argument("--objective", choices=sorted(_OBJECTIVES), default=None)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep-bias", help="objective vs small-cell bias")
    _add_common(p)
    p.add_argument("--objective", choices=sorted(_OBJECTIVES), default=None)
    p.add_argument("--bias-grid", dest="bias_grid", default=None,
                   help="start:stop:step in dB, or comma list")
    p.set_defaults(fn=_cmd_sweep_bias, eta_grid=None)

    p = sub.add_parser("sweep-blanking", help="objective vs (bias, eta)")
    _add_common(p)
    p.add_argument("--objective", choices=sorted(_OBJECTIVES), default=None)
    p.add_argument("--bias-grid", dest="bias_grid", default=None)
    p.add_argument("--eta-grid", dest="eta_grid", default=None)
    p.add_argument("--variant", choices=sorted(_VARIANTS), default="re_only_in_blank")
    p.set_defaults(fn=_cmd_sweep_blanking)

    p = sub.add_parser("trend", help="optimal bias vs small-cell density ratio")
    _add_common(p)
    p.add_argument("--mode", choices=[m.value for m in TrendMode], required=True)
    p.add_argument("--ratios", default="3,10", help="comma-separated density ratios")
    p.add_argument("--objective", choices=sorted(_OBJECTIVES), default=None)
    p.add_argument("--bias-grid", dest="bias_grid", default=None)
    p.add_argument("--eta-grid", dest="eta_grid", default=None)
    p.set_defaults(fn=_cmd_trend)

    p = sub.add_parser("preset", help="built-in experiment recipes")
    p.add_argument("name", help=f"one of: {', '.join(_PRESETS)}")
    _add_common(p, config_required=False)
    p.set_defaults(fn=_cmd_preset)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateScenario, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
