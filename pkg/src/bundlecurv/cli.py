"""Command-line interface: ``bundlecurv <subcommand> [options]``.

Subcommands ``certify``, ``total-curvature``, ``spectral-verify`` and
``direct-image`` run one group of checks, ``report`` runs all of them and
``list-catalog`` prints the catalog.  numpy is imported only after the
thread count is fixed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")
SUBCOMMANDS = ("certify", "total-curvature", "spectral-verify", "direct-image", "report")


def build_parser():
    parser = argparse.ArgumentParser(prog="bundlecurv",
                                     description="Curvature verification for Hermitian bundles.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} checks")
        p.add_argument("--config", help="JSON or INI run configuration")
        p.add_argument("--out", help="output directory (default bundlecurv-out)")
        p.add_argument("--seed", type=int, default=None, help="random seed (default 42)")
        p.add_argument("--threads", type=int, default=None,
                       help="BLAS threads (default $BUNDLECURV_THREADS)")
        p.add_argument("--points", type=int, default=None, help="sample points per catalog entry")
        p.add_argument("--csv", action="store_true", help="also write report.csv")
    sub.add_parser("list-catalog", help="print catalog entries and their facts")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", None)
    if threads is None:
        threads = os.environ.get("BUNDLECURV_THREADS") or None
    if threads is not None:
        try:
            threads = int(threads)
        except ValueError:
            threads = 0
        if threads < 1:
            print("error: the thread count must be a positive integer", file=sys.stderr)
            return 2
        for var in THREAD_VARS:
            os.environ[var] = str(threads)
    from .errors import ConfigError
    from .runner import RunConfig, list_catalog, run

    if args.command == "list-catalog":
        print("\n".join(list_catalog()))
        return 0
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        cfg.checks = [args.command] if args.command != "report" or not args.config else cfg.checks
        for key in ("out", "seed", "points"):
            val = getattr(args, key)
            if val is not None:
                setattr(cfg, key, val)
        if args.csv:
            cfg.csv = True
        if threads:
            cfg.threads = threads
        cfg.__post_init__()
    except ConfigError as exc:
        print(f"configuration error at {exc.path}: {exc}", file=sys.stderr)
        return 2
    code = run(cfg)
    doc = json.loads((Path(cfg.out) / "report.json").read_text())
    for r in doc["reports"]:
        print(f"{r['status']:<12} {r['check']}")
    s = doc["summary"]
    print(f"{s['PASS']} passed, {s['FAIL']} failed, {s['REPORT-ONLY']} report-only; "
          f"written to {Path(cfg.out) / 'report.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())
