"""Command-line interface.

Subcommands:
  run      execute a configured simulation batch (replicates, m-sweeps)
  analyze  topology report for a saved edge-list CSV
  ba       generate a degree-proportional attachment baseline graph

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 engine or
analysis error, 1 unexpected failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import io
from .baselines import generate_ba
from .config import RunSpec
from .errors import ConfigError, ContactNetError
from .runner import run_simulation
from .topology import build_report


def _int_list(raw: str):
    try:
        return tuple(int(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactnet",
        description="Bipartite contact-network growth and SIR transmission simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation batch from a config file")
    p_run.add_argument("--config", required=True, help="INI config file path")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override master seed")
    p_run.add_argument("--replicates", type=int, default=None, help="override replicate count")
    p_run.add_argument("--sweep-m", type=_int_list, default=None,
                       help="comma-separated m values to sweep")
    p_run.add_argument("--snapshot-at", type=_int_list, default=None,
                       help="comma-separated timesteps for edge snapshots")

    p_an = sub.add_parser("analyze", help="topology report for a saved edge list")
    p_an.add_argument("--edges", required=True, help="edge-list CSV path")
    p_an.add_argument("--out", default=None, help="directory for report CSVs (optional)")

    p_ba = sub.add_parser("ba", help="generate a preferential-attachment baseline graph")
    p_ba.add_argument("--n", type=int, required=True, help="node count")
    p_ba.add_argument("--m", type=int, required=True, help="links per joining node")
    p_ba.add_argument("--m0", type=int, default=None, help="seed node count (default m+1)")
    p_ba.add_argument("--seed", type=int, default=0, help="RNG seed")
    p_ba.add_argument("--out", default=None, help="write edge list CSV here")
    return parser


def _cmd_run(args) -> int:
    spec = io.parse_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["config"] = spec.config.with_overrides(rng_seed=args.seed)
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.sweep_m is not None:
        overrides["sweep_m"] = args.sweep_m
    if args.snapshot_at is not None:
        overrides["snapshot_at"] = args.snapshot_at
    if args.out is not None:
        overrides["out_dir"] = args.out
    if overrides:
        from dataclasses import replace

        spec = replace(spec, **overrides)
    batch = run_simulation(spec)
    print(f"wrote {len(batch.run_dirs)} run(s) under {batch.out_dir}")
    for row in batch.summary_rows:
        print(
            f"m={row['m']}: mean links={_short(row['mean_links'])} "
            f"gamma={_short(row['mean_gamma'])} R2={_short(row['mean_r_squared'])} "
            f"assortativity={_short(row['mean_assortativity'])}"
        )
    return 0


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _cmd_analyze(args) -> int:
    snap = io.read_edge_list(args.edges)
    report = build_report(snap)
    print(f"nodes={len(snap.degrees)} edges={len(snap.edges)}")
    print(f"avg_degree={report.avg_degree!r}")
    if report.fit is None:
        print("gamma=undefined")
        print("r_squared=undefined")
    else:
        print(f"gamma={report.fit.gamma!r}")
        print(f"r_squared={report.fit.r_squared!r}")
    if report.assortativity is None:
        print("assortativity=undefined")
    else:
        print(f"assortativity={report.assortativity!r}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_topology_report(report, out / "topology.csv")
        print(f"report written to {out / 'topology.csv'}")
    return 0


def _cmd_ba(args) -> int:
    m0 = args.m0 if args.m0 is not None else args.m + 1
    rng = np.random.default_rng(args.seed)
    net = generate_ba(args.n, args.m, m0, rng)
    report = build_report(net.snapshot())
    print(f"nodes={net.n} edges={len(net.edges)}")
    if report.fit is None:
        print("gamma=undefined")
        print("r_squared=undefined")
    else:
        print(f"gamma={report.fit.gamma!r}")
        print(f"r_squared={report.fit.r_squared!r}")
    if args.out is not None:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = sorted((int(u), int(v)) for u, v in net.edges)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["u", "v"])
            writer.writerows(rows)
        print(f"edge list written to {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "ba":
            return _cmd_ba(args)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"contactnet: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"contactnet: io error: {exc}", file=sys.stderr)
        return 3
    except ContactNetError as exc:
        print(f"contactnet: engine error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
