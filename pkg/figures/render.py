#!/usr/bin/env python3
"""Render plots from the geronimus CLI's CSV output.

Two schemas are understood, detected from the header row:

  x,P,Q_...        overlay: classical polynomial dotted, each perturbed
                   curve solid, horizontal zero line
  N,zero_*,limit_* trajectory: zeros against the mass, limit targets as
                   horizontal guides

Usage: render.py <input.csv> <output.png> [--window xmin xmax ymin ymax]
"""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

STYLE = {
    "figure.figsize": (8.0, 5.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def read_csv(path: str) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise SchemaError(f"no data rows in {path!r}")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as exc:
        raise SchemaError(f"non-numeric cell under header {header}: {exc}")
    return header, data


class SchemaError(Exception):
    pass


def render_overlay(header, data, out_path, window=None):
    curve_labels = header[1:]
    if len(curve_labels) < 2:
        raise SchemaError(f"overlay needs at least two curve columns, got header {header}")
    x = data[:, 0]
    fig, ax = plt.subplots()
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.plot(x, data[:, 1], linestyle=":", color="black", linewidth=1.6, label=curve_labels[0])
    for j, label in enumerate(curve_labels[1:], start=2):
        ax.plot(x, data[:, j], linewidth=1.1, label=label)
    ax.set_xlabel("x")
    ax.legend(loc="best", fontsize=8)
    _finish(fig, ax, out_path, window)


def render_trajectory(header, data, out_path, window=None):
    n = sum(1 for h in header if h.startswith("zero_"))
    limits = [
        float(data[0, j]) for j, h in enumerate(header) if h.startswith("limit_")
    ]
    masses = data[:, 0]
    fig, ax = plt.subplots()
    positive = masses > 0
    log_ok = np.count_nonzero(positive) >= 2 and masses[positive].max() / masses[positive].min() > 100
    for k in range(n):
        ax.plot(masses, data[:, 1 + k], marker=".", linewidth=1.1, label=header[1 + k])
    for lim in limits:
        ax.axhline(lim, linestyle="--", color="gray", linewidth=0.8)
    if log_ok:
        ax.set_xscale("symlog", linthresh=float(masses[positive].min()))
    ax.set_xlabel("mass N")
    ax.set_ylabel("zeros")
    ax.legend(loc="best", fontsize=8)
    _finish(fig, ax, out_path, window)


def _finish(fig, ax, out_path, window):
    if window:
        ax.set_xlim(window[0], window[1])
        ax.set_ylim(window[2], window[3])
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Software": "geronimus-figures"})
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input_csv")
    parser.add_argument("output_png")
    parser.add_argument("--window", nargs=4, type=float, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    args = parser.parse_args(argv)
    plt.rcParams.update(STYLE)
    try:
        header, data = read_csv(args.input_csv)
        if header[0] == "x" and len(header) >= 3 and header[1] == "P":
            render_overlay(header, data, args.output_png, args.window)
        elif header[0] == "N" and any(h.startswith("zero_") for h in header):
            render_trajectory(header, data, args.output_png, args.window)
        else:
            raise SchemaError(f"unrecognized header {header}")
    except SchemaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
