"""Command-line experiment runner.

    meshsched run [--preset NAME | --config PATH] [overrides...]
    meshsched topology [--config PATH] --out FILE

Exit status: 0 success, 2 configuration error, 3 disconnected topology.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ExperimentPlan, apply_overrides, load_config, preset
from .engine import SimConfig, Simulation, build_topology
from .metrics import atomic_write, run_stem, summary, to_csv, write_reports
from .model import ConfigError
from .topology import DisconnectedTopology, degree_bounds, write_edge_list

log = logging.getLogger("meshsched")

EXIT_CONFIG = 2
EXIT_DISCONNECTED = 3

TRACE_HEADER = ["slot", "m", "channel", "link", "rate", "power_mw", "commodity", "pi"]
SWEEP_FIELDS = ["policy", "nodes", "area", "seed", "channels", "slots",
                "aggregate_throughput_mbps", "total_received", "mean_delay_slots",
                "jfi_throughput", "jfi_inverse_delay", "jfi_throughput_over_delay"]


def _completed(cfg: SimConfig, out_dir: Path):
    """Summary of a finished run with the same manifest, else None."""
    path = out_dir / f"{run_stem(cfg.manifest())}_summary.json"
    if not path.exists():
        return None
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if doc.get("manifest", {}).get("config_hash") != cfg.manifest()["config_hash"]:
        return None
    return doc["summary"]


def execute_run(cfg: SimConfig, out_dir: Path, trace: bool = False) -> dict:
    done = _completed(cfg, out_dir)
    if done is not None:
        log.info("skip %s (already complete)", run_stem(cfg.manifest()))
        return done
    topo = build_topology(cfg)
    sim = Simulation(topo, cfg, trace=trace)
    ledger = sim.run()
    stem = run_stem(ledger.manifest)
    if trace:
        atomic_write(out_dir / f"{stem}_trace.csv",
                     to_csv(TRACE_HEADER, sim.trace_rows, ledger.manifest))
    tmp_topo = out_dir / f"{stem}_topology.txt"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_edge_list(topo, tmp_topo)
    # the summary JSON is written last and marks the run complete
    write_reports(ledger, out_dir)
    log.info("done %s", stem)
    return summary(ledger)


def _execute(args):
    return execute_run(*args)


def run_experiment(plan: ExperimentPlan, jobs: int = 1) -> Path:
    """Run every configuration of ``plan``; returns the sweep summary path."""
    out_dir = Path(plan.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    work = [(cfg, out_dir, plan.trace) for cfg in plan.runs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute, work))
    else:
        results = [_execute(w) for w in work]
    rows = []
    for cfg, res in zip(plan.runs, results):
        rows.append([cfg.policy, cfg.nodes, cfg.area, cfg.seed, cfg.channels, cfg.slots]
                    + [res.get(k, "n/a") for k in SWEEP_FIELDS[6:]])
    path = out_dir / f"{plan.name}_sweep_summary.csv"
    atomic_write(path, to_csv(SWEEP_FIELDS, rows))
    return path


def _load_plan(args) -> ExperimentPlan:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset, not both")
    plan = load_config(args.config) if args.config else preset(args.preset or "default")
    return apply_overrides(plan, policy=args.policy, seed=args.seed, slots=args.slots,
                           channels=args.channels, schedules=args.schedules, out=args.out,
                           trace=True if args.trace else None)


def cmd_run(args) -> int:
    plan = _load_plan(args)
    path = run_experiment(plan, jobs=args.jobs)
    print(path.read_text(), end="")
    return 0


def cmd_topology(args) -> int:
    plan = _load_plan(args)
    cfg = plan.runs[0]
    topo = build_topology(cfg)
    out = Path(args.file)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_edge_list(topo, out)
    lo, hi = degree_bounds(topo.n_nodes)
    degs = [topo.degree(i) for i in topo.nodes]
    print(f"nodes={topo.n_nodes} links={len(topo.links) // 2} gateways={list(topo.gateways)} "
          f"degree min={min(degs)} max={max(degs)} target=[{lo},{hi}]")
    return 0


def _common(p):
    p.add_argument("--config", type=Path, help="INI config with [phy] [net] [flows] [scheduler] [output]")
    p.add_argument("--preset", choices=["default", "mrmc", "sweep"])
    p.add_argument("--policy", help="one of W Wr WD WrD Wrd WrdD")
    p.add_argument("--seed", type=int)
    p.add_argument("--slots", type=int)
    p.add_argument("--channels", type=int)
    p.add_argument("--schedules", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--trace", action="store_true", help="write the per-slot schedule trace")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshsched", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a single configuration or a sweep")
    _common(run_p)
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.set_defaults(func=cmd_run)
    topo_p = sub.add_parser("topology", help="build the initial topology and write its edge list")
    _common(topo_p)
    topo_p.add_argument("file", help="output edge-list path")
    topo_p.set_defaults(func=cmd_topology)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except DisconnectedTopology as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
