"""INI-style experiment configuration and experiment plans.

Sections ``[phy]``, ``[net]``, ``[flows]``, ``[scheduler]`` and ``[output]``.
Space-separated lists in ``nodes``/``area``/``seeds``/``policies``/``channels``
expand into a sweep (``nodes`` and ``area`` are zipped, the rest crossed).
"""

from __future__ import annotations

import configparser
import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path

from .engine import SimConfig
from .model import ConfigError, PhyConfig
from .weights import POLICIES, parse_policy

KNOWN = {
    "phy": {"noise_dbm", "max_power_dbm", "path_loss_exponent", "reference_distance_m",
            "slot_us", "packet_bytes", "rates"},
    "net": {"nodes", "area", "seed", "seeds", "gateways", "topology_file"},
    "flows": {"mode", "count", "sources", "max_rate", "v"},
    "scheduler": {"policy", "policies", "schedules", "channels", "radios", "slots"},
    "output": {"dir", "trace"},
}


@dataclass
class ExperimentPlan:
    runs: list[SimConfig]
    out_dir: Path = Path("results")
    trace: bool = False
    name: str = "plan"


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _rates(text: str) -> tuple[tuple[float, float], ...]:
    """``54:24.56, 48:24.05, ...`` in Mbps:dB."""
    out = []
    for item in text.replace(",", " ").split():
        rate, _, db = item.partition(":")
        if not db:
            raise ConfigError(f"rate entry {item!r} must look like MBPS:DB")
        out.append((float(rate) * 1e6, float(db)))
    return tuple(out)


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentPlan:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    for section in cp.sections():
        if section not in KNOWN:
            raise ConfigError(f"unknown section [{section}]")
        extra = set(cp[section]) - KNOWN[section]
        if extra:
            raise ConfigError(f"unknown keys in [{section}]: {', '.join(sorted(extra))}")

    def get(section, key, default=None):
        return cp.get(section, key, fallback=default) if cp.has_section(section) else default

    try:
        phy = PhyConfig.from_conventional(
            noise_dbm=float(get("phy", "noise_dbm", -90)),
            max_power_dbm=float(get("phy", "max_power_dbm", 20)),
            path_loss_exponent=float(get("phy", "path_loss_exponent", 3)),
            reference_distance=float(get("phy", "reference_distance_m", 10)),
            slot_us=float(get("phy", "slot_us", 625)),
            packet_bytes=int(get("phy", "packet_bytes", 1470)),
        )
        rates = _rates(get("phy", "rates")) if get("phy", "rates") else ()

        nodes = _ints(get("net", "nodes", "10"))
        areas = _floats(get("net", "area", "350"))
        if len(areas) == 1:
            areas = areas * len(nodes)
        if len(areas) != len(nodes):
            raise ConfigError("[net] area must list one value or one per node count")
        seeds = _ints(get("net", "seeds", get("net", "seed", "1")))
        gw_text = get("net", "gateways", "max-distance").strip()
        if gw_text == "max-distance":
            gw_mode, gw_ids = "max-distance", ()
        else:
            gw_mode, gw_ids = "explicit", tuple(_ints(gw_text))
        topo_file = get("net", "topology_file")
        if topo_file and base_dir is not None and not Path(topo_file).is_absolute():
            topo_file = str(base_dir / topo_file)

        flow_mode = get("flows", "mode", "first")
        flow_count = int(get("flows", "count", 8))
        sources = tuple(_ints(get("flows", "sources", "")))
        if sources:
            flow_mode = "explicit"
        max_rate = float(get("flows", "max_rate", 10))
        v = float(get("flows", "v", 30))

        pol_text = get("scheduler", "policies", get("scheduler", "policy", "all"))
        policies = list(POLICIES) if pol_text.strip() == "all" else [
            parse_policy(p) for p in pol_text.replace(",", " ").split()]
        sched_text = get("scheduler", "schedules")
        schedules = int(sched_text) if sched_text else None
        channel_list = _ints(get("scheduler", "channels", "1"))
        radios_text = get("scheduler", "radios")
        radios = int(radios_text) if radios_text else None
        slots = int(get("scheduler", "slots", 10_000))

        out_dir = Path(get("output", "dir", "results"))
        trace = cp.getboolean("output", "trace", fallback=False) if cp.has_section("output") else False
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    runs = []
    for (n, area), seed, channels, policy in itertools.product(
            zip(nodes, areas), seeds, channel_list, policies):
        runs.append(SimConfig(
            nodes=n, area=area, seed=seed, policy=policy, slots=slots, schedules=schedules,
            channels=channels, radios=radios, gateway_mode=gw_mode, gateway_ids=gw_ids,
            flow_mode=flow_mode, flow_count=flow_count, flow_sources=sources,
            max_rate=max_rate, v=v, phy=phy, rates=rates, topology_file=topo_file))
    return ExperimentPlan(runs=runs, out_dir=out_dir, trace=trace)


def load_config(path) -> ExperimentPlan:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    plan = parse_config(text, base_dir=path.parent)
    plan.name = path.stem
    return plan


PRESETS = {
    # ten nodes in a 350 m square, two farthest nodes as gateways, all policies
    "default": """
[net]
nodes = 10
area = 350
seed = 1
[scheduler]
policies = all
slots = 10000
""",
    # two radios and two channels against the single-channel baseline
    "mrmc": """
[net]
nodes = 10
area = 350
seed = 1
[scheduler]
policies = Wr WrD
channels = 1 2
slots = 10000
""",
    # network-size sweep; eight random sources in the larger networks
    "sweep": """
[net]
nodes = 10 15 20
area = 350 450 500
seed = 1
[flows]
mode = random
[scheduler]
policies = all
slots = 2600
""",
}


def preset(name: str) -> ExperimentPlan:
    try:
        plan = parse_config(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    if name == "sweep":
        # the ten-node case keeps nodes 2..9 style sources
        plan.runs = [replace(r, flow_mode="first") if r.nodes == 10 else r for r in plan.runs]
    plan.name = name
    return plan


def apply_overrides(plan: ExperimentPlan, policy=None, seed=None, slots=None, channels=None,
                    schedules=None, out=None, trace=None) -> ExperimentPlan:
    runs = plan.runs
    if policy is not None:
        p = parse_policy(policy)
        runs = [replace(r, policy=p) for r in runs]
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if slots is not None:
        changes["slots"] = slots
    if channels is not None:
        changes["channels"] = channels
        changes["radios"] = channels
    if schedules is not None:
        changes["schedules"] = schedules
    runs = [replace(r, **changes) for r in runs] if changes else runs
    # overrides can collapse a sweep axis; drop duplicates, keep order
    unique = list(dict.fromkeys(runs))
    return ExperimentPlan(
        runs=unique,
        out_dir=Path(out) if out is not None else plan.out_dir,
        trace=plan.trace if trace is None else trace,
        name=plan.name,
    )
