"""Command-line entry point: presets, execution, CSV emission.

Subcommands:
  analytic   closed-form sweeps only, no simulation
  simulate   Monte Carlo only
  compare    both, paired columns
  figures    run the fig2..fig6 presets, one CSV set per figure

Exit codes: 0 ok, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import __version__
from .config import (FIGURE_PRESETS, PRESETS, ConfigError, build_config,
                     parse_config_text)
from .montecarlo import (ExperimentConfig, sweep, write_meta_csv,
                         write_sir_ccdf_csv, write_slots_csv,
                         write_success_csv)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2d-discovery",
        description="Monte Carlo and closed-form evaluation of slotted "
                    "D2D discovery under uplink interference")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("analytic", "closed-form sweeps only"),
            ("simulate", "Monte Carlo only"),
            ("compare", "simulation with paired analytic columns"),
            ("figures", "produce the CSV sets behind the figure analogues")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=Path, help="key-value config file")
        p.add_argument("--out", type=Path, default=Path("out"),
                       help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--preset", default="default",
                       choices=sorted(PRESETS), help="experiment preset")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="trial-level parallelism")
        p.add_argument("--mode", choices=("single_message", "full_signaling"),
                       help="message granularity override")
        p.add_argument("--interferers",
                       choices=("saturated", "contention_only"),
                       help="per-slot interferer set override")
        p.add_argument("--shadowing", choices=("on", "off"),
                       help="log-normal shadowing override")
        if name == "figures":
            p.add_argument("figs", nargs="*", default=[],
                           metavar="FIG", help="subset of fig2..fig6")
    return parser


def _flag_overrides(args) -> dict:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mode is not None:
        overrides["message_mode"] = args.mode
    if args.interferers is not None:
        overrides["interferers"] = args.interferers
    if args.shadowing is not None:
        overrides["shadowing"] = args.shadowing == "on"
    return overrides


def _load_config(args, preset_name: str) -> tuple[ExperimentConfig, tuple]:
    preset = dict(PRESETS[preset_name])
    per_n = preset.pop("per_n", None)
    file_keys = {}
    if args.config is not None:
        file_keys = parse_config_text(args.config.read_text())
    return build_config(preset, file_keys, _flag_overrides(args)), per_n


def _write_outputs(config: ExperimentConfig, out_dir: Path, records,
                   extra_meta: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sir_ccdf_csv(records, out_dir / "sir_ccdf.csv")
    write_success_csv(records, out_dir / "success.csv")
    write_slots_csv(records, out_dir / "slots.csv")
    write_meta_csv(config, out_dir / "meta.csv", __version__, extra_meta)


def _strip_analytic(records):
    return [dataclasses.replace(r, sir_ccdf_analytic=None,
                                p_success_analytic=None,
                                slots_cdf_analytic=None,
                                required_slots_analytic=None)
            for r in records]


def _run_experiment(args, preset_name: str, out_dir: Path) -> None:
    config, per_n = _load_config(args, preset_name)
    variants = [(None, config)]
    if per_n:
        variants = [(n, build_config(
            {k: v for k, v in PRESETS[preset_name].items() if k != "per_n"},
            {"N": n},
            parse_config_text(args.config.read_text()) if args.config else {},
            _flag_overrides(args))) for n in per_n]
    for n, cfg in variants:
        target = out_dir if n is None else out_dir / f"N{n}"
        meta = {"subcommand": args.command, "preset": preset_name}
        if n is not None:
            meta["pair_count"] = n
        if args.command == "analytic":
            records = sweep(cfg, simulate=False)
        else:
            records = sweep(cfg, jobs=max(1, args.jobs))
            if args.command == "simulate":
                records = _strip_analytic(records)
        _write_outputs(cfg, target, records, meta)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "figures":
            figs = args.figs or list(FIGURE_PRESETS)
            unknown = [f for f in figs if f not in FIGURE_PRESETS]
            if unknown:
                raise ConfigError(f"unknown figure preset(s): "
                                  f"{', '.join(unknown)}")
            # figures always runs the paired comparison
            args.command = "compare"
            for fig in figs:
                _run_experiment(args, fig, args.out / fig)
        else:
            _run_experiment(args, args.preset, args.out)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: {err}", file=sys.stderr)
        return 3
    return 0


def entry() -> None:
    sys.exit(main())
