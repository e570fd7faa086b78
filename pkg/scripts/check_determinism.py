#!/usr/bin/env python3
"""Run one preset with two worker counts and compare the CSV bytes.

    python3 scripts/check_determinism.py fig3 --trials 100 --workers 1 4
"""
import argparse
import hashlib
import tempfile
from pathlib import Path

from qmimo_secrecy.cli import main as cli_main
from qmimo_secrecy.presets import PRESETS


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("preset", choices=sorted(PRESETS))
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--drops", type=int, default=200)
    ap.add_argument("--workers", type=int, nargs=2, default=(1, 2))
    args = ap.parse_args()

    digests = []
    with tempfile.TemporaryDirectory() as d:
        for w in args.workers:
            out = Path(d) / f"w{w}.csv"
            argv = ["preset", args.preset, "--trials", str(args.trials), "--drops", str(args.drops)]
            if cli_main(argv + ["--workers", str(w), "--out", str(out)]) != 0:
                return 1
            digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
            print(f"workers={w}: sha256 {digests[-1]}")
    same = digests[0] == digests[1]
    print("identical" if same else "DIFFERENT")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
