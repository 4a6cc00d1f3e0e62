"""Greedy per-slot construction of concurrent link schedules.

Links are sorted by weight. The top ``M`` links seed ``M`` schedules at the
fastest rate they can sustain alone. Then, for each rate from fastest to
slowest, every unplaced non-negative-weight link is offered to the
schedules in order; it joins the first one it shares no node with and
whose minimum-power solve stays within ``(0, P_max]``.

Time fractions put the whole slot on the schedule with the largest rate
sum (the vertex solution of the linear program); in multi-channel mode the
schedules are dealt round-robin to channels and each channel picks its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ConfigError, RateTable, Topology
from .power import Status, gain_matrix_from_indices, solve_powers


@dataclass
class Schedule:
    links: list[int] = field(default_factory=list)       # indices into topo.links
    rate_index: list[int] = field(default_factory=list)  # indices into the rate table
    powers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    commodity: list[int] = field(default_factory=list)   # gateway index per link
    pi: float = 0.0
    channel: int = 0
    mask: int = 0                                        # bitmask of busy nodes

    def __len__(self):
        return len(self.links)

    def rates(self, table: RateTable) -> list[float]:
        return [table.entries[n].rate for n in self.rate_index]

    def rate_sum(self, table: RateTable) -> float:
        return float(sum(self.rates(table)))


@dataclass(frozen=True)
class SchedulerConfig:
    schedules: int
    channels: int = 1
    radios: int = 1

    def __post_init__(self):
        if self.schedules < 1:
            raise ConfigError("need at least one schedule per slot")
        if self.channels < 1:
            raise ConfigError("need at least one channel")
        if self.channels > self.radios:
            raise ConfigError(f"{self.channels} channels but only {self.radios} radios per node")
        if self.channels > 1 and self.radios != self.channels:
            raise ConfigError("multi-channel mode requires radios == channels")


class GreedyScheduler:
    """Per-topology precomputation plus the per-slot greedy search."""

    def __init__(self, topo: Topology, table: RateTable, links=None):
        self.topo = topo
        self.table = table
        self.links = tuple(topo.links if links is None else links)
        self.noise = topo.phy.noise_mw
        self.p_max = topo.phy.max_power_mw
        self.tx = np.array([i - 1 for i, _ in self.links], dtype=np.intp)
        self.rx = np.array([j - 1 for _, j in self.links], dtype=np.intp)
        self.masks = [(1 << i) | (1 << j) for i, j in zip(self.tx, self.rx)]
        self.beta = table.thresholds
        self.direct = topo.gains[self.rx, self.tx]
        # minimum power of each link transmitting alone, per rate
        self.single_power = self.noise * self.beta[None, :] / self.direct[:, None]
        self.single_ok = self.single_power <= self.p_max
        self.pair_ok = self._pair_table()

    def _pair_table(self) -> np.ndarray:
        """pair_ok[a, b, na, nb]: links a and b can coexist at those rates.

        Infeasible pairs cannot be part of any feasible larger set, so this
        only prunes candidates the full solve would reject anyway.
        """
        g = self.topo.gains
        ga = self.direct[:, None, None, None] / self.beta[None, None, :, None]
        gb = self.direct[None, :, None, None] / self.beta[None, None, None, :]
        c_ab = g[np.ix_(self.rx, self.tx)][:, :, None, None]   # tx of b into rx of a
        c_ba = g[np.ix_(self.rx, self.tx)].T[:, :, None, None]  # tx of a into rx of b
        det = ga * gb - c_ab * c_ba
        with np.errstate(divide="ignore", invalid="ignore"):
            pa = self.noise * (gb + c_ab) / det
            pb = self.noise * (ga + c_ba) / det
        ok = (det > 0) & (pa <= self.p_max) & (pb <= self.p_max)
        tx, rx = self.tx, self.rx
        share = ((tx[:, None] == tx[None, :]) | (tx[:, None] == rx[None, :])
                 | (rx[:, None] == tx[None, :]) | (rx[:, None] == rx[None, :]))
        ok &= ~share[:, :, None, None]
        return ok

    def solve(self, links, rate_index):
        th = self.beta[list(rate_index)]
        a = gain_matrix_from_indices(self.topo.gains, self.tx[links], self.rx[links], th)
        return solve_powers(a, self.noise, self.p_max)

    def _try_add(self, sch: Schedule, link: int, n: int):
        if not self.single_ok[link, n]:
            return None
        pair = self.pair_ok[link]
        for k, nk in zip(sch.links, sch.rate_index):
            if not pair[k, n, nk]:
                return None
        links = sch.links + [link]
        rates = sch.rate_index + [n]
        sol = self.solve(links, rates)
        return sol.powers if sol.status is Status.OK else None

    def build(self, weights: np.ndarray, commodity: np.ndarray, m: int) -> list[Schedule]:
        """Build ``m`` schedules from per-link weights (in ``self.links`` order)."""
        links = self.links
        order = sorted(range(len(links)), key=lambda q: (-weights[q], links[q]))
        eligible = [q for q in order if weights[q] >= 0]
        schedules = [Schedule() for _ in range(m)]
        placed = set()

        for sch, q in zip(schedules, eligible[:m]):
            for n in range(len(self.table)):
                powers = self._try_add(sch, q, n)
                if powers is not None:
                    self._commit(sch, q, n, powers, commodity)
                    placed.add(q)
                    break

        for n in range(len(self.table)):
            for q in eligible:
                if q in placed:
                    continue
                mask = self.masks[q]
                for sch in schedules:
                    if sch.mask & mask:
                        continue
                    powers = self._try_add(sch, q, n)
                    if powers is not None:
                        self._commit(sch, q, n, powers, commodity)
                        placed.add(q)
                        break
        return schedules

    def _commit(self, sch: Schedule, q: int, n: int, powers, commodity) -> None:
        sch.links.append(q)
        sch.rate_index.append(n)
        sch.commodity.append(int(commodity[q]))
        sch.powers = np.asarray(powers, dtype=float)
        sch.mask |= self.masks[q]


def build_schedules(topo: Topology, table: RateTable, weights, commodity, m: int,
                    scheduler: GreedyScheduler | None = None) -> list[Schedule]:
    scheduler = scheduler or GreedyScheduler(topo, table)
    return scheduler.build(np.asarray(weights, dtype=float), np.asarray(commodity), m)


def allocate_time_fractions(rate_sums) -> np.ndarray:
    """All time to the schedule with the largest rate sum (lowest index on ties)."""
    rate_sums = list(rate_sums)
    if not rate_sums:
        raise ValueError("no schedules to allocate time to")
    best = max(range(len(rate_sums)), key=lambda m: (rate_sums[m], -m))
    pi = np.zeros(len(rate_sums))
    pi[best] = 1.0
    return pi


def partition_channels(schedules: list[Schedule], table: RateTable,
                       channels: int = 1) -> list[list[Schedule]]:
    """Deal schedules round-robin over channels and set each one's time fraction."""
    if channels < 1:
        raise ConfigError("need at least one channel")
    groups = [schedules[c::channels] for c in range(channels)]
    for c, group in enumerate(groups):
        if not group:
            continue
        pi = allocate_time_fractions(s.rate_sum(table) for s in group)
        for s, frac in zip(group, pi):
            s.pi = float(frac)
            s.channel = c
    return groups


def slot_objective(schedules, table: RateTable, weights, packets_per_bit_slot: float) -> float:
    """Per-slot objective: sum over active links of (packets carried + weight)."""
    total = 0.0
    for s in schedules:
        for q, n in zip(s.links, s.rate_index):
            total += table.entries[n].rate * s.pi * packets_per_bit_slot + weights[q]
    return total
