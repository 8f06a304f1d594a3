#!/usr/bin/env python3
"""Run every benchmark config in configs/ and collect results under results/.

Usage: python scripts/run_desk_benchmarks.py [--jobs J] [--trials T]
"""

import argparse
import glob
import os
import sys

from cas_srfe.bench_cli import cli_main

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--outdir", default=os.path.join(ROOT, "results"))
    args = parser.parse_args()

    configs = sorted(glob.glob(os.path.join(ROOT, "configs", "*.json")))
    if not configs:
        print("no configs found", file=sys.stderr)
        return 1
    for path in configs:
        name = os.path.splitext(os.path.basename(path))[0]
        out = os.path.join(args.outdir, name)
        print(f"== {name} -> {out}")
        argv = ["run", path, "--out", out]
        if args.jobs is not None:
            argv += ["--jobs", str(args.jobs)]
        if args.trials is not None:
            argv += ["--trials", str(args.trials)]
        code = cli_main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
