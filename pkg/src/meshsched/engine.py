"""Slotted simulation loop.

Each slot: admit traffic at the sources, weigh links, build schedules and
time fractions, move packets with per-link bit credit, then apply arrivals
(store-and-forward, one slot per hop) and update the rate counters.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .metrics import MetricsLedger
from .model import ConfigError, PhyConfig, RateTable, Topology, sample_positions
from .queues import QueueState
from .scheduler import GreedyScheduler, SchedulerConfig, partition_channels
from .topology import construct_topology, read_edge_list, select_gateways
from .traffic import Packet, RateController, make_flows, select_sources
from .weights import WeightState, parse_policy


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one run."""

    nodes: int = 10
    area: float = 350.0
    seed: int = 1
    policy: str = "W"
    slots: int = 10_000
    schedules: int | None = None      # default: number of gateways + 1
    channels: int = 1
    radios: int | None = None         # default: equal to channels
    gateway_mode: str = "max-distance"
    gateway_ids: tuple[int, ...] = ()
    flow_mode: str = "first"
    flow_count: int = 8
    flow_sources: tuple[int, ...] = ()
    max_rate: float = 10.0
    v: float = 30.0
    phy: PhyConfig = field(default_factory=PhyConfig)
    rates: tuple[tuple[float, float], ...] = ()   # (bit/s, dB); empty = default table
    topology_file: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "policy", parse_policy(self.policy))
        if self.slots < 0:
            raise ConfigError("slots must be >= 0")
        if self.nodes < 4 and self.topology_file is None:
            raise ConfigError("need at least 4 nodes")

    def rate_table(self) -> RateTable:
        return RateTable.from_pairs(self.rates) if self.rates else RateTable.default()

    def manifest(self) -> dict:
        d = asdict(self)
        blob = json.dumps(d, sort_keys=True, default=str)
        return {
            "policy": self.policy, "nodes": self.nodes, "seed": self.seed,
            "slots": self.slots, "channels": self.channels,
            "config_hash": hashlib.sha256(blob.encode()).hexdigest()[:16],
            "version": f"meshsched {__version__}",
        }


def default_schedules(cfg: SimConfig, n_gateways: int) -> int:
    """Gateways + 1, rounded up so every channel gets equally many schedules."""
    if cfg.schedules is not None:
        return cfg.schedules
    c = cfg.channels
    return -(-(n_gateways + 1) // c) * c


def build_topology(cfg: SimConfig) -> Topology:
    if cfg.topology_file:
        return read_edge_list(cfg.topology_file, cfg.phy)
    pos = sample_positions(cfg.nodes, cfg.area, cfg.seed)
    gws = select_gateways(pos, cfg.gateway_mode, cfg.gateway_ids)
    return construct_topology(pos, cfg.phy, gws)


def serve_link(credit: float, capacity: float, backlog: int, packet_bits: float):
    """Packets a link moves this slot and the bit credit it keeps.

    Capacity adds to the carried-over credit; each whole packet's worth of
    credit moves one queued packet. Credit left over after the queue runs
    dry is kept only as a partial packet.
    """
    credit += capacity
    moved = min(int(credit // packet_bits), backlog)
    credit -= moved * packet_bits
    if credit >= packet_bits:
        credit = math.fmod(credit, packet_bits)
    return moved, credit


@dataclass
class QueueTrace:
    """Per-slot queue bookkeeping, arrays indexed [slot, node, gateway]."""

    start: list = field(default_factory=list)
    generated: list = field(default_factory=list)
    out: list = field(default_factory=list)
    inflow: list = field(default_factory=list)
    end: list = field(default_factory=list)

    def as_arrays(self):
        return tuple(np.array(x) for x in (self.start, self.generated, self.out,
                                           self.inflow, self.end))


class Simulation:
    def __init__(self, topo: Topology, cfg: SimConfig, trace: bool = False,
                 queue_trace: bool = False):
        self.topo = topo
        self.cfg = cfg
        self.table = cfg.rate_table()
        gws = topo.gateways
        radios = cfg.radios if cfg.radios is not None else cfg.channels
        self.sched_cfg = SchedulerConfig(default_schedules(cfg, len(gws)), cfg.channels, radios)
        sources = select_sources(cfg.flow_mode, topo.n_nodes, gws, cfg.flow_count,
                                 cfg.flow_sources, seed=cfg.seed)
        self.flows = make_flows(sources, cfg.max_rate)
        self.controller = RateController(self.flows, gws, cfg.v)
        self.queues = QueueState(topo.n_nodes, gws)
        self.scheduler = GreedyScheduler(topo, self.table)
        self.weights = WeightState(len(topo.links), len(gws), cfg.policy,
                                   rate_unit=self.table.lowest_rate)
        self.credit = np.zeros(len(topo.links))
        self.t = 0
        shape = (topo.n_nodes + 1, len(gws))
        self.cum_generated = np.zeros(shape, dtype=np.int64)
        self.cum_in = np.zeros(shape, dtype=np.int64)
        self.cum_out = np.zeros(shape, dtype=np.int64)
        self.trace_rows = [] if trace else None
        self.queue_trace = QueueTrace() if queue_trace else None
        self.ledger = MetricsLedger(
            slots=0, slot_duration=topo.phy.slot_duration, packet_bits=topo.phy.packet_bits,
            flows={f.flow_id: f.source for f in self.flows}, gateways=gws, links=topo.links,
            manifest=cfg.manifest())
        self.last_schedules = []

    def step(self) -> None:
        t, q, topo = self.t, self.queues, self.topo
        gws, gidx = q.gateways, q.gw_index
        lp = topo.phy.packet_bits
        qt = self.queue_trace
        if qt is not None:
            qt.start.append(q.lengths.copy())
        gen = np.zeros_like(q.lengths)

        for adm in self.controller.control(q.node_lengths):
            src = self.ledger.flows[adm.flow_id]
            for _ in range(adm.packets):
                q.push(src, Packet(adm.flow_id, src, adm.gateway, t))
            gen[src, gidx[adm.gateway]] += adm.packets
            self.ledger.generated_by_gw[adm.flow_id][adm.gateway] += adm.packets

        w = self.weights.compute(q.lengths, q.head_ages(t),
                                 self.scheduler.tx + 1, self.scheduler.rx + 1)
        schedules = self.scheduler.build(w.value, w.commodity, self.sched_cfg.schedules)
        partition_channels(schedules, self.table, self.sched_cfg.channels)
        self.last_schedules = schedules

        capacity = {}
        for m, s in enumerate(schedules):
            if self.trace_rows is not None:
                for k, (link, n) in enumerate(zip(s.links, s.rate_index)):
                    i, j = topo.links[link]
                    self.trace_rows.append([t, m + 1, s.channel + 1, f"{i}-{j}",
                                            self.table.entries[n].rate, s.powers[k],
                                            gws[s.commodity[k]], s.pi])
            if s.pi <= 0:
                continue
            for link, n, c in zip(s.links, s.rate_index, s.commodity):
                rate = self.table.entries[n].rate
                capacity[link] = capacity.get(link, 0.0) + rate * s.pi * topo.phy.slot_duration
                self.weights.record(link, c, rate, s.pi)

        out = np.zeros_like(q.lengths)
        arrivals = []
        links = topo.links
        for link in sorted(capacity, key=lambda k: (-w.value[k], links[k])):
            i, j = links[link]
            gw = gws[w.commodity[link]]
            k = w.commodity[link]
            moved, self.credit[link] = serve_link(self.credit[link], capacity[link],
                                                  int(q.lengths[i, k]), lp)
            for _ in range(moved):
                pkt = q.pop(i, gw)
                pkt.hops += 1
                arrivals.append((j, pkt))
            out[i, k] += moved

        inflow = np.zeros_like(q.lengths)
        for j, pkt in arrivals:
            if j == pkt.dest:
                self.ledger.delivered_by_gw[pkt.flow_id][pkt.dest] += 1
                self.ledger.delays[pkt.flow_id].append(t + 1 - pkt.created)
                self.ledger.hops[pkt.flow_id].append((pkt.dest, pkt.hops))
            else:
                if j in gidx:
                    self.ledger.gateway_relays += 1
                q.push(j, pkt)
                inflow[j, gidx[pkt.dest]] += 1

        self.cum_generated += gen
        self.cum_out += out
        self.cum_in += inflow
        if qt is not None:
            qt.generated.append(gen)
            qt.out.append(out)
            qt.inflow.append(inflow)
            qt.end.append(q.lengths.copy())
        self.t += 1

    def run(self, slots: int | None = None) -> MetricsLedger:
        slots = self.cfg.slots if slots is None else slots
        for _ in range(slots):
            self.step()
        return self.finish()

    def finish(self) -> MetricsLedger:
        led = self.ledger
        led.slots = self.t
        for f in led.backlog:
            led.backlog[f] = 0
        for pkt in self.queues.packets():
            led.backlog[pkt.flow_id] += 1
        led.link_rate = self.weights.total.copy()
        led.link_rate_by_gw = self.weights.per_gateway.copy()
        return led


def run(cfg: SimConfig, **kwargs) -> MetricsLedger:
    topo = build_topology(cfg)
    return Simulation(topo, cfg, **kwargs).run()


def with_overrides(cfg: SimConfig, **changes) -> SimConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
