"""Flow admission at the sources and gateway selection.

Each slot a source picks the gateway whose local queue is shortest and
admits ``V / Q`` packets (``R_max`` when that queue is empty), bounded by
the node's per-slot budget. Fractional admissions accumulate as credit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigError


@dataclass(frozen=True)
class FlowSpec:
    flow_id: int
    source: int
    max_rate: float = 10.0


@dataclass(slots=True)
class Packet:
    flow_id: int
    source: int
    dest: int
    created: int
    hops: int = 0


@dataclass
class Admission:
    flow_id: int
    admitted: float
    gateway: int
    packets: int


def shortest_queue(lengths, gateways) -> tuple[int, float]:
    """Gateway with the shortest queue; ties go to the lowest gateway id."""
    best = min(range(len(gateways)), key=lambda k: (lengths[k], gateways[k]))
    return gateways[best], float(lengths[best])


def target_rate(v: float, q: float, max_rate: float) -> float:
    if q <= 0:
        return max_rate
    return v / q


@dataclass
class RateController:
    """Per-run admission state: fractional credit per flow."""

    flows: tuple[FlowSpec, ...]
    gateways: tuple[int, ...]
    v: float = 30.0
    credit: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for f in self.flows:
            if f.source in self.gateways:
                raise ConfigError(f"flow {f.flow_id} source {f.source} is a gateway")
        self.credit = {f.flow_id: 0.0 for f in self.flows}

    def control(self, queue_lengths) -> list[Admission]:
        """``queue_lengths(node)`` returns that node's per-gateway lengths."""
        budget: dict[int, float] = {}
        out = []
        for f in self.flows:
            gw, q = shortest_queue(queue_lengths(f.source), self.gateways)
            remaining = budget.setdefault(f.source, f.max_rate)
            admitted = min(target_rate(self.v, q, f.max_rate), remaining)
            budget[f.source] = remaining - admitted
            c = self.credit[f.flow_id] + admitted
            n = math.floor(c + 1e-12)
            self.credit[f.flow_id] = max(c - n, 0.0)
            out.append(Admission(f.flow_id, admitted, gw, n))
        return out


def realized_split(generated_by_gateway: dict[int, dict[int, int]], gateways):
    """Fraction of each flow's packets sent to each gateway; flows with none are omitted."""
    split = {}
    for flow, counts in generated_by_gateway.items():
        total = sum(counts.get(g, 0) for g in gateways)
        if total:
            split[flow] = tuple(counts.get(g, 0) / total for g in gateways)
    return split


def select_sources(mode: str, n_nodes: int, gateways, count: int = 8, ids=None,
                   seed: int = 0) -> tuple[int, ...]:
    candidates = [i for i in range(1, n_nodes + 1) if i not in gateways]
    if mode == "explicit":
        srcs = tuple(int(i) for i in ids or ())
        bad = [s for s in srcs if s not in candidates]
        if bad or not srcs:
            raise ConfigError(f"invalid explicit sources {srcs}")
        return srcs
    if count > len(candidates):
        raise ConfigError(f"{count} flows requested but only {len(candidates)} non-gateway nodes")
    if mode == "first":
        return tuple(candidates[:count])
    if mode == "random":
        rng = np.random.default_rng(seed)
        return tuple(sorted(int(x) for x in rng.choice(candidates, size=count, replace=False)))
    raise ConfigError(f"unknown flow source mode {mode!r}")


def make_flows(sources, max_rate: float = 10.0) -> tuple[FlowSpec, ...]:
    return tuple(FlowSpec(k, s, max_rate) for k, s in enumerate(sources, start=1))
