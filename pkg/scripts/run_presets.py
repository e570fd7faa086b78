#!/usr/bin/env python3
"""Regenerate every figure preset into a results directory.

    python3 scripts/run_presets.py results/ --workers 4
    python3 scripts/run_presets.py results/ --only fig3 fig6 --trials 0
"""
import argparse
import sys
import time
from pathlib import Path

from qmimo_secrecy.cli import main as cli_main
from qmimo_secrecy.presets import PRESETS


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--only", nargs="+", choices=sorted(PRESETS), help="subset of presets")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--trials", type=int, help="override the per-preset trial count (0 = analytic only)")
    ap.add_argument("--drops", type=int, help="override the number of geometry drops")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    names = args.only or sorted(PRESETS, key=lambda s: int(s[3:]))
    status = 0
    for name in names:
        argv = ["preset", name, "--out", str(args.out_dir / f"{name}.csv"), "--workers", str(args.workers), "--gnuplot"]
        for flag, value in (("--trials", args.trials), ("--drops", args.drops), ("--seed", args.seed)):
            if value is not None:
                argv += [flag, str(value)]
        t0 = time.perf_counter()
        code = cli_main(argv)
        print(f"{name}: exit {code} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
        status = status or code
    return status


if __name__ == "__main__":
    raise SystemExit(main())
