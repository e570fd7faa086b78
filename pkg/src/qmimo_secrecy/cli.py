"""Command-line entry point: ``python3 -m qmimo_secrecy <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .experiments import (
    CDF_COLUMNS,
    CSV_COLUMNS,
    DEFAULT_SEED,
    GeometryModel,
    experiment_from_dict,
    rows_to_csv,
    run_experiment,
    run_geometry_cdf,
    write_gnuplot,
    write_meta,
    write_rows,
)
from .presets import PRESETS, GeometryPreset, build_preset
from .rates import Regime


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _single_point(d: dict, scenario: str) -> dict:
    d = dict(d)
    d.setdefault("scenario", scenario)
    if "sweep" not in d:
        n = d.get("base", {}).get("n_antennas", 64)
        d["sweep"] = {"variable": "N", "values": [n]}
    return d


def _emit(rows, columns, exps, out: Optional[str], gnuplot: bool, geom=None, x_label="sweep value") -> None:
    if out is None:
        sys.stdout.write(rows_to_csv(rows, columns))
        return
    write_rows(rows, out, columns)
    write_meta(out, exps, geom)
    if gnuplot and geom is None:
        write_gnuplot(out, rows, x_label)


def _run_table(exps, args) -> None:
    rows = []
    for e in exps:
        rows.extend(run_experiment(e, workers=args.workers, write=False))
    x_label = exps[0].sweep.variable if exps and exps[0].sweep else "sweep value"
    _emit(rows, CSV_COLUMNS, exps, args.out, args.gnuplot, x_label=x_label)


def _run_cdf(exps, geom, num_drops, args) -> None:
    rows = []
    for e in exps:
        rows.extend(run_geometry_cdf(e, geom, num_drops, workers=args.workers, write=False))
    _emit(rows, CDF_COLUMNS, exps, args.out, args.gnuplot, geom)


def cmd_analytic(args) -> None:
    d = _single_point(_load_config(args.config), "RATE_VS_N")
    d["trials"] = 0
    _run_table([experiment_from_dict(d, seed=args.seed)], args)


def cmd_simulate(args) -> None:
    d = _single_point(_load_config(args.config), "RATE_VS_N")
    trials = args.trials if args.trials is not None else (d.get("trials") or 2000)
    _run_table([experiment_from_dict(d, seed=args.seed, trials=trials)], args)


def cmd_sweep(args) -> None:
    d = _load_config(args.config)
    if "sweep" not in d:
        raise ValueError("sweep needs a config with a 'sweep' entry")
    d.setdefault("scenario", "RATE_VS_N")
    _run_table([experiment_from_dict(d, seed=args.seed, trials=args.trials)], args)


def cmd_asymptote(args) -> None:
    d = _load_config(args.config)
    d["scenario"] = "ASYMPTOTE"
    d.setdefault("sweep", {"variable": "N", "values": [2**e for e in range(5, 31)]})
    d.setdefault("regimes", [r.value for r in Regime])
    d.setdefault("base", {}).setdefault("theta", None)
    _run_table([experiment_from_dict(d, seed=args.seed, trials=args.trials or 0)], args)


def cmd_cdf(args) -> None:
    d = _load_config(args.config)
    d["scenario"] = "GEOMETRY_CDF"
    geom = GeometryModel(**d.pop("geometry", {}))
    num_drops = args.drops or d.pop("num_drops", 10_000)
    d.pop("num_drops", None)
    exp = experiment_from_dict(d, seed=args.seed, trials=0)
    _run_cdf([exp], geom, int(num_drops), args)


def cmd_preset(args) -> None:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    built = build_preset(args.name, trials=args.trials, seed=seed, num_drops=args.drops)
    if isinstance(built, GeometryPreset):
        _run_cdf(built.experiments, built.geometry, built.num_drops, args)
    else:
        _run_table(built, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmimo-secrecy",
        description="Secrecy rates of one-bit massive MIMO downlinks under active eavesdropping.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment description (powers in dB)")
    common.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point (0 disables simulation)")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for trials and drops")
    common.add_argument("--drops", type=int, help="random drops for CDF experiments")
    common.add_argument("--gnuplot", action="store_true", help="also write <out>.gp")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (
        ("analytic", cmd_analytic, "closed-form rates only"),
        ("simulate", cmd_simulate, "closed form plus Monte Carlo"),
        ("sweep", cmd_sweep, "parameter sweep from a config file"),
        ("asymptote", cmd_asymptote, "large-N behaviour and limits per power-scaling regime"),
        ("cdf", cmd_cdf, "secrecy-rate CDF over random geometries"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
    p = sub.add_parser("preset", parents=[common], help="run a named preset")
    p.add_argument("name", choices=sorted(PRESETS, key=lambda s: int(s[3:])))
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
