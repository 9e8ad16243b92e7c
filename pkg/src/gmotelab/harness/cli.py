"""Command line entry point: ``gmotelab run|report|compare|toy``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .. import __version__
from ..errors import GmoteLabError
from ..evalstats import METRICS
from .experiment import load_spec, read_results, run_experiment, write_results
from .report import compare, summarize_metric
from .toys import toy_example1, toy_example2, toy_table


def _run(args) -> int:
    spec = load_spec(args.config)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    out = Path(spec.output)
    if args.out is not None:
        out = Path(args.out) / out.name
    results = run_experiment(spec)
    write_results(results, out)
    failed = sum(r.metrics is None for r in results)
    print(f"wrote {len(results)} rows to {out}" + (f" ({failed} failed cells)" if failed else ""))
    return 0


def _report(args) -> int:
    table = summarize_metric(read_results(args.results), args.metric)
    sys.stdout.write(table.to_csv() if args.format == "csv" else table.to_text())
    return 0


def _compare(args) -> int:
    rep = compare(read_results(args.results), baseline=args.baseline,
                  metrics=tuple(args.metric), pairing=args.pairing)
    sys.stdout.write(rep.to_csv() if args.format == "csv" else rep.to_text())
    return 0


def _toy(args) -> int:
    rec = (toy_example1 if args.which == 1 else toy_example2)(args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "role", "method"])
        for a, b, role, method in toy_table(rec):
            w.writerow([repr(a), repr(b), role, method])
    print(f"wrote {rec.n_samples} rows to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gmotelab",
                                description="Oversampling benchmark for imbalanced binary data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a cross-validated experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int, help="override the master seed")
    r.add_argument("--out", help="directory for the results CSV")
    r.set_defaults(func=_run)

    rp = sub.add_parser("report", help="average table for one metric")
    rp.add_argument("--results", required=True)
    rp.add_argument("--metric", required=True, choices=METRICS)
    rp.add_argument("--format", choices=("text", "csv"), default="text")
    rp.set_defaults(func=_report)

    c = sub.add_parser("compare", help="paired Wilcoxon tests against a baseline method")
    c.add_argument("--results", required=True)
    c.add_argument("--baseline", default="GMOTE")
    c.add_argument("--metric", action="append", choices=METRICS,
                   help="metric to test (repeatable; default accuracy and f1)")
    c.add_argument("--pairing", choices=("dataset", "fold"), default="dataset")
    c.add_argument("--format", choices=("text", "csv"), default="text")
    c.set_defaults(func=_compare)

    t = sub.add_parser("toy", help="write a two-dimensional toy dataset as CSV")
    t.add_argument("--which", type=int, choices=(1, 2), required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.set_defaults(func=_toy)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "metric", None) is None and args.command == "compare":
        args.metric = ["accuracy", "f1"]
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (GmoteLabError, OSError, ValueError) as exc:
        print(f"gmotelab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
