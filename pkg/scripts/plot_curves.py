#!/usr/bin/env python3
"""Plot adaptive-vs-baseline error curves from one or more curves.csv files.

Usage: python scripts/plot_curves.py results/f1_desk/curves.csv [more.csv ...]
"""

import argparse
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

LABELS = {"cas": "adaptive (CAS)", "nas": "baseline (NAS)"}


def load(path):
    curves = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            curves.setdefault(row["arm"], []).append(
                (int(row["m"]), float(row["geo_mean_error"])))
    return {arm: sorted(pts) for arm, pts in curves.items()}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("csv_files", nargs="+")
    parser.add_argument("--out", default=None, help="output image path")
    args = parser.parse_args()

    fig, axes = plt.subplots(1, len(args.csv_files), squeeze=False,
                             figsize=(5 * len(args.csv_files), 4))
    for ax, path in zip(axes[0], args.csv_files):
        for arm, pts in load(path).items():
            ms, errs = zip(*pts)
            ax.semilogy(ms, errs, marker="o", label=LABELS.get(arm, arm))
        ax.set_xlabel("sample count m")
        ax.set_ylabel("geometric-mean relative error")
        ax.set_title(os.path.basename(os.path.dirname(os.path.abspath(path))))
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    out = args.out or "curves.png"
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
