"""Command line: run, sweep, check-bound and compare scenarios.

Log verbosity comes from the GEOSCHED_LOG environment variable (e.g. DEBUG).
"""
from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from .sim.config import DEPLOYMENTS, ConfigError, load_config
from .sim.report import write_outputs
from .sim.runner import Simulation


def _seeds(text: str) -> List[int]:
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",") if x]


def _run_one(cfg, out: Optional[Path]):
    sim = Simulation(cfg)
    report = sim.run()
    if out is not None:
        write_outputs(report, sim, out)
    return report


def _summary(report) -> dict:
    return {
        "deployment": report.deployment,
        "seed": report.seed,
        "makespan": round(report.makespan, 3),
        "avg_response_time": round(report.avg_response_time, 3),
        "completed": report.completed,
        "machine_cost": float(report.machine_cost),
        "transfer_cost": float(report.transfer_cost),
        "cross_dc_bytes": report.cross_dc_bytes,
        "bound": report.bound,
        "bound_ok": report.bound_ok,
    }


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.deployment:
        cfg = cfg.replace(deployment=args.deployment)
    report = _run_one(cfg, Path(args.out))
    print(json.dumps(_summary(report), sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    paths = sorted(glob.glob(args.configs))
    if not paths:
        print(f"no configs match {args.configs}", file=sys.stderr)
        return 2
    for path in paths:
        base = load_config(path)
        for seed in _seeds(args.seeds):
            out = Path(args.out) / Path(path).stem / f"seed{seed}" if args.out else None
            report = _run_one(base.replace(seed=seed), out)
            print(json.dumps({"config": path, **_summary(report)}, sort_keys=True))
    return 0


def cmd_check_bound(args) -> int:
    cfg = load_config(args.config).replace(deployment="houtu")
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    report = _run_one(cfg, Path(args.out) if args.out else None)
    print(json.dumps(_summary(report), sort_keys=True))
    if report.bound is None:
        print("bound not applicable (a task violates theta <= r <= 1 - delta)", file=sys.stderr)
        return 2
    return 0 if report.bound_ok else 1


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    deps = [d.strip() for d in args.deployments.split(",") if d.strip()]
    for d in deps:
        if d not in DEPLOYMENTS:
            print(f"unknown deployment {d}", file=sys.stderr)
            return 2
    rows = []
    for d in deps:
        out = Path(args.out) / d if args.out else None
        rows.append(_summary(_run_one(cfg.replace(deployment=d), out)))
    for row in rows:
        print(json.dumps(row, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geosched", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario and write its outputs")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--deployment", choices=DEPLOYMENTS)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run every config matching a glob over a seed range")
    s.add_argument("--configs", required=True)
    s.add_argument("--seeds", required=True, help="a..b or a,b,c")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("check-bound", help="exit nonzero if the makespan exceeds the bound")
    b.add_argument("--config", required=True)
    b.add_argument("--seed", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_check_bound)

    c = sub.add_parser("compare", help="run one scenario under several deployments")
    c.add_argument("--deployments", required=True)
    c.add_argument("--config", required=True)
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("GEOSCHED_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
