"""Command line interface: ``simulate``, ``coherence``, ``factorize``, ``plot``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import astuple

import numpy as np

from . import coherence as coh
from .config import PARSERS, InvalidConfigError, load_config
from .decomposition import rank_one_factorize
from .errors import ConvergenceError
from .ranking import default_discounts
from .simulation import CSV_COLUMNS, medians, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("dcglearn")


class UsageError(Exception):
    pass


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def write_rows(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([f"{v:.10g}" if isinstance(v, float) else v for v in astuple(row)])


def cmd_simulate(args) -> int:
    overrides = {
        key: getattr(args, key) for key in PARSERS if getattr(args, key, None) is not None
    }
    cfg = load_config(args.config, overrides)
    rows = run_experiment(cfg)
    if args.output in (None, "-"):
        write_rows(rows, sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_rows(rows, fh)
    for key in ("n_train_pairs", "noise_pairs", "noise_grades"):
        groups = medians(rows, key)
        if len(groups) > 1 or key == "n_train_pairs":
            summary = ", ".join(f"{k}: {v:.3f}" for k, v in groups.items())
            print(f"median precision by {key}: {summary}", file=sys.stderr)
    return EXIT_OK


def _one_based(ranking):
    return "(" + ",".join(str(i + 1) for i in ranking) + ")"


def cmd_coherence(args) -> int:
    if args.binary is not None:
        ok = coh.verify_binary_coherence(args.binary, args.n, args.k, args.seed)
        print(f"binary coherence over {args.binary} trials: {'no violation' if ok else 'VIOLATION FOUND'}")
        return EXIT_OK
    if args.grades is None or args.gains_a is None:
        raise UsageError("--grades and --gains-a are required unless --binary is given")
    grades = _ints(args.grades)
    gains = np.array(_floats(args.gains_a))
    k = args.k or len(grades)
    discounts = np.array(_floats(args.discounts)) if args.discounts else default_discounts(k)
    if args.search is not None:
        found = coh.find_counterexample_exponent(grades, gains, discounts, k, args.search)
        print("no counterexample on the grid" if found is None else f"smallest incoherent exponent: {found:g}")
        return EXIT_OK
    if args.gains_b is not None:
        gains_b = np.array(_floats(args.gains_b))
    elif args.exponent is not None:
        gains_b = gains**args.exponent
    else:
        raise UsageError("give --gains-b, --exponent or --search")
    verdict = coh.check_coherence(grades, gains, gains_b, discounts, k)
    print(f"coherent: {verdict.coherent} ({verdict.n_sequences} distinct top-{k} sequences, "
          f"{verdict.ties_skipped} tied pairs skipped)")
    if not verdict.coherent:
        first, second = verdict.witness
        a1, a2, b1, b2 = verdict.scores
        print(f"witness: {_one_based(first)} vs {_one_based(second)}")
        print(f"ranker A: {a1:.12g} vs {a2:.12g}")
        print(f"ranker B: {b1:.12g} vs {b2:.12g}")
    return EXIT_OK


def cmd_factorize(args) -> int:
    try:
        data = np.loadtxt(args.input, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read weights from {args.input}: {exc}") from exc
    if 1 in data.shape:
        if args.block_size is None:
            raise UsageError("a flat weight vector needs --block-size")
        flat = data.ravel()
        if flat.size % args.block_size:
            raise UsageError("vector length is not a multiple of the block size")
        matrix = flat.reshape(-1, args.block_size).T
    else:
        matrix = data
    f = rank_one_factorize(matrix)
    print(f"sigma1,{f.sigma1:.12g}")
    print(f"residual_ratio,{f.residual_ratio:.6g}")
    print("gains_est," + ",".join(f"{v:.12g}" for v in f.gains_est))
    print("discounts_est," + ",".join(f"{v:.12g}" for v in f.discounts_est))
    return EXIT_OK


def cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(args.input, encoding="utf-8", newline="") as fh:
        records = list(csv.DictReader(fh))
    if not records:
        raise UsageError(f"{args.input} holds no rows")
    if args.x not in records[0] or args.metric not in records[0]:
        raise UsageError(f"columns {args.x!r} and {args.metric!r} must be present")
    fixed = [c for c in ("model", "pair_mode", "n_train_pairs", "noise_pairs", "noise_grades") if c != args.x]
    series: dict = {}
    for rec in records:
        label = tuple((c, rec[c]) for c in fixed if len({r[c] for r in records}) > 1)
        series.setdefault(label, {}).setdefault(float(rec[args.x]), []).append(float(rec[args.metric]))
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, points in sorted(series.items()):
        xs = sorted(points)
        ax.plot(xs, [np.nanmedian(points[x]) for x in xs], marker="o",
                label=", ".join(f"{c}={v}" for c, v in label) or args.metric)
    ax.set_xlabel(args.x)
    ax.set_ylabel(f"median {args.metric}")
    ax.grid(alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, format="svg")
    plt.close(fig)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcglearn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation and write result rows as CSV")
    sim.add_argument("--config", help="flat key = value config file")
    sim.add_argument("--output", "-o", default="-", help="CSV path, '-' for stdout")
    for key in PARSERS:
        sim.add_argument("--" + key.replace("_", "-"), dest=key, metavar="VALUE")
    sim.set_defaults(func=cmd_simulate)

    co = sub.add_parser("coherence", help="check two gain vectors for coherence")
    co.add_argument("--grades", help="grade of each item, e.g. 2,3,1")
    co.add_argument("--gains-a", help="gains per grade, grade 1 first")
    co.add_argument("--gains-b")
    co.add_argument("--exponent", type=float, help="use gains-a ** exponent as ranker B")
    co.add_argument("--search", type=float, metavar="KMAX", help="grid-search the smallest incoherent exponent")
    co.add_argument("--discounts", help="discount per rank (default 1/log2(k+1))")
    co.add_argument("--k", type=int, default=None)
    co.add_argument("--binary", type=int, metavar="TRIALS", help="random two-grade coherence trials")
    co.add_argument("--n", type=int, default=6)
    co.add_argument("--seed", type=int, default=0)
    co.set_defaults(func=cmd_coherence)

    fa = sub.add_parser("factorize", help="rank-one split of a learned weight vector")
    fa.add_argument("--input", required=True, help="CSV: one flat vector, or a block_size x K matrix")
    fa.add_argument("--block-size", type=int)
    fa.set_defaults(func=cmd_factorize)

    pl = sub.add_parser("plot", help="SVG line plot of a results CSV")
    pl.add_argument("--input", required=True)
    pl.add_argument("--output", required=True)
    pl.add_argument("--x", default="n_train_pairs")
    pl.add_argument("--metric", default="precision", choices=("precision", "similarity", "chosen_c"))
    pl.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InvalidConfigError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
