"""Command-line surface: golden tables, mass sweeps, figure data, verification.

Exit codes: 0 success, 1 usage or parameter-domain error, 2 verification or
check failure.  Data goes to stdout (or --out), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import verify as verify_mod
from .errors import GeronimusError
from .ladder import charge_location
from .measures import MeasureSpec, eval_monic_derivs, jacobi, laguerre
from .transform import eval_QcN, make_context
from .zeros import sweep as run_sweep

SCHEMA = "geronimus/1"
CHECK_TOL = 5e-6

# Embedded reference rows: mass, zeros (ascending), short-range charge location.
TABLE_SPECS = {
    1: {
        "measure": laguerre(0.0),
        "c": -1.0,
        "n": 3,
        "rows": [
            (0.0, (0.296771, 1.794881, 5.327153), -1.27309),
            (0.0125, (0.096936, 1.381317, 4.846199), -0.039345),
            (0.025, (-0.079531, 1.196907, 4.66079), -0.015274),
            (0.05, (-0.324373, 1.050055, 4.50679), -0.156362),
            (5.0, (-0.988481, 0.87094, 4.276644), -0.700057),
        ],
    },
    2: {
        "measure": jacobi(0.5, 1.0),
        "c": -1.5,
        "n": 4,
        "rows": [
            (0.0, (-0.784545, -0.302212, 0.304654, 0.806277), -1.61637),
            (0.0008, (-0.925906, -0.430453, 0.230271, 0.784909), -0.97778),
            (0.002, (-1.080633, -0.488136, 0.19919, 0.776221), -1.04893),
            (0.05, (-1.467364, -0.544057, 0.163585, 0.765818), -1.35837),
            (5.0, (-1.499661, -0.546604, 0.161684, 0.765238), -1.38587),
        ],
    },
}

FIGURE_SPECS = {
    1: {"table": 1, "x_lo": -1.5, "x_hi": 7.0, "points": 600},
    2: {"table": 2, "x_lo": -1.6, "x_hi": 1.05, "points": 600},
}


def fmt(v: float) -> str:
    return format(float(v), ".9g")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# table


def compute_table(table_id: int) -> list[dict]:
    spec = TABLE_SPECS[table_id]
    ctx = make_context(spec["measure"], spec["c"], 0.0, spec["n"] + 2)
    from .zeros import zeros_geronimus

    rows = []
    for N, _, _ in spec["rows"]:
        zs = zeros_geronimus(ctx, spec["n"], N).zeros
        z_charge = charge_location(ctx, spec["n"], N)
        rows.append({"N": N, "zeros": [float(v) for v in zs], "z": float(z_charge)})
    return rows


def check_table(table_id: int, rows: list[dict]) -> list[str]:
    mismatches = []
    for row, (N, zeros_ref, z_ref) in zip(rows, TABLE_SPECS[table_id]["rows"]):
        for k, (got, want) in enumerate(zip(row["zeros"], zeros_ref)):
            if abs(got - want) > CHECK_TOL:
                mismatches.append(
                    f"table {table_id} N={N:g} zero {k + 1}: got {got!r}, want {want!r}"
                )
        if abs(row["z"] - z_ref) > CHECK_TOL:
            mismatches.append(
                f"table {table_id} N={N:g} z: got {row['z']!r}, want {z_ref!r}"
            )
    return mismatches


def cmd_table(args) -> int:
    rows = compute_table(args.id)
    n = TABLE_SPECS[args.id]["n"]
    if args.format == "json":
        payload = {"schema": SCHEMA, "table": args.id, "rows": rows}
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        header = ["N"] + [f"zero_{k + 1}" for k in range(n)] + ["z"]
        data = [[r["N"], *r["zeros"], r["z"]] for r in rows]
        _emit(_csv_text(header, data), args.out)
    if args.check:
        mismatches = check_table(args.id, rows)
        if mismatches:
            for m in mismatches:
                sys.stderr.write(m + "\n")
            return 2
        sys.stderr.write(f"table {args.id}: all values within {CHECK_TOL:g}\n")
    return 0


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class RunConfig:
    """Validated sweep configuration assembled from the parsed flags."""

    measure: MeasureSpec
    c: float
    n: int
    masses: tuple[float, ...]
    command: str
    fmt: str
    out: str | None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GeronimusError(f"degree n must be at least 1, got {self.n}")
        if any(N < 0 for N in self.masses):
            raise GeronimusError("masses must be nonnegative")


def _parse_masses(args) -> tuple[float, ...]:
    if args.N_logrange:
        try:
            lo, hi, count = args.N_logrange.split(":")
            lo, hi, count = float(lo), float(hi), int(count)
        except ValueError:
            raise GeronimusError("--N-logrange expects lo:hi:count")
        if lo <= 0 or hi <= lo or count < 1:
            raise GeronimusError("--N-logrange requires 0 < lo < hi and count >= 1")
        return tuple(np.geomspace(lo, hi, count))
    if args.N is None or not args.N.strip():
        raise GeronimusError("empty mass list; pass --N or --N-logrange")
    try:
        values = tuple(float(tok) for tok in args.N.split(",") if tok.strip())
    except ValueError:
        raise GeronimusError(f"could not parse mass list {args.N!r}")
    if not values:
        raise GeronimusError("empty mass list; pass --N or --N-logrange")
    return values


def _measure_from(args) -> MeasureSpec:
    if args.measure == "laguerre":
        if args.beta is not None:
            raise GeronimusError("beta applies to Jacobi only")
        return laguerre(args.alpha)
    if args.beta is None:
        raise GeronimusError("Jacobi requires --beta > -1")
    return jacobi(args.alpha, args.beta)


def sweep_config(args) -> RunConfig:
    return RunConfig(
        _measure_from(args), args.c, args.n, _parse_masses(args),
        "sweep", args.format, args.out,
    )


def cmd_sweep(args) -> int:
    config = sweep_config(args)
    ctx = make_context(config.measure, config.c, 0.0, config.n + 2)
    traj = run_sweep(ctx, config.n, config.masses)
    n = config.n
    sys.stderr.write(
        f"monotonicity ({traj.direction}): verdict {traj.verdict}\n"
    )
    if config.fmt == "json":
        payload = {
            "schema": SCHEMA,
            "measure": config.measure.describe(),
            "c": config.c,
            "n": n,
            "direction": traj.direction,
            "verdict": traj.verdict,
            "limits": [float(v) for v in traj.limits],
            "rate_signed": [float(v) for v in traj.rate_signed],
            "rows": [
                {
                    "N": float(N),
                    "zeros": [float(v) for v in traj.zeros[i]],
                    "products": [float(v) for v in traj.products[i]],
                }
                for i, N in enumerate(traj.N_values)
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", config.out)
    else:
        header = (
            ["N"]
            + [f"zero_{k + 1}" for k in range(n)]
            + [f"limit_{k + 1}" for k in range(n)]
            + [f"Nprod_{k + 1}" for k in range(n)]
        )
        rows = [
            [N, *traj.zeros[i], *traj.limits, *traj.products[i]]
            for i, N in enumerate(traj.N_values)
        ]
        _emit(_csv_text(header, rows), config.out)
    return 0


# ---------------------------------------------------------------------------
# figure-data


def cmd_figure_data(args) -> int:
    fig = FIGURE_SPECS[args.id]
    table = TABLE_SPECS[fig["table"]]
    spec, c, n = table["measure"], table["c"], table["n"]
    masses = [row[0] for row in table["rows"]]
    ctx = make_context(spec, c, 0.0, n + 2)
    x = np.linspace(fig["x_lo"], fig["x_hi"], fig["points"])
    cols = [eval_monic_derivs(ctx.recurrence, n, x, order=0)[0]]
    labels = ["P"]
    for N in masses:
        cols.append(eval_QcN(ctx, n, x, N, order=0)[0])
        labels.append(f"Q_N={N:g}")
    if args.format == "json":
        payload = {
            "schema": SCHEMA,
            "figure": args.id,
            "x": [float(v) for v in x],
            "curves": {lab: [float(v) for v in col] for lab, col in zip(labels, cols)},
        }
        _emit(json.dumps(payload) + "\n", args.out)
    else:
        header = ["x"] + labels
        rows = [[x[i], *(col[i] for col in cols)] for i in range(len(x))]
        _emit(_csv_text(header, rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    report = verify_mod.run_suite(args.suite)
    _emit(json.dumps(report, indent=2, default=str) + "\n", args.out)
    return 0 if not report["failures"] else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geronimus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="reproduce an embedded reference zero table")
    p_table.add_argument("id", type=int, choices=(1, 2))
    p_table.add_argument("--check", action="store_true",
                         help="compare against embedded reference digits")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.add_argument("--out", default=None)
    p_table.set_defaults(fn=cmd_table)

    p_sweep = sub.add_parser("sweep", help="zero trajectories over a mass list")
    p_sweep.add_argument("--measure", choices=("laguerre", "jacobi"), required=True)
    p_sweep.add_argument("--alpha", type=float, required=True)
    p_sweep.add_argument("--beta", type=float, default=None)
    p_sweep.add_argument("--c", type=float, required=True)
    p_sweep.add_argument("--n", type=int, required=True)
    p_sweep.add_argument("--N", default=None, help="comma-separated ascending masses")
    p_sweep.add_argument("--N-logrange", dest="N_logrange", default=None,
                         help="lo:hi:count geometric mass grid")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_fig = sub.add_parser("figure-data", help="dense curve samples for the figures")
    p_fig.add_argument("id", type=int, choices=(1, 2))
    p_fig.add_argument("--format", choices=("csv", "json"), default="csv")
    p_fig.add_argument("--out", default=None)
    p_fig.set_defaults(fn=cmd_figure_data)

    p_ver = sub.add_parser("verify", help="run property suites over the default grid")
    p_ver.add_argument(
        "suite", nargs="?", default="all",
        choices=("all",) + tuple(verify_mod.SUITES),
    )
    p_ver.add_argument("--out", default=None)
    p_ver.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GeronimusError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
