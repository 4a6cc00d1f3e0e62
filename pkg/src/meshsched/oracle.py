"""Exhaustive reference for the single-slot scheduling problem on tiny instances.

Feasibility here deliberately avoids the direct linear solve used by the
scheduler: minimum powers come from the monotone fixed-point power-control
iteration started at zero, and acceptance is a direct SINR evaluation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import PhyConfig, RateTable

MAX_LINKS = 8
SINR_TOL = 1e-9


@dataclass(frozen=True)
class TinyInstance:
    """Directed links (0-based node pairs) over a dense gain matrix."""

    gains: np.ndarray
    links: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]
    table: RateTable
    phy: PhyConfig

    def __post_init__(self):
        if len(self.links) != len(self.weights):
            raise ValueError("one weight per link required")


@dataclass(frozen=True)
class OracleResult:
    links: tuple[int, ...]          # indices into instance.links
    rate_index: tuple[int, ...]
    powers: tuple[float, ...]
    objective: float


def node_exclusive(pairs) -> bool:
    nodes = [v for pair in pairs for v in pair]
    return len(nodes) == len(set(nodes))


def fixed_point_powers(inst: TinyInstance, members, rate_index, max_iter=200_000):
    """Least powers meeting every SINR target, or None if above P_max / divergent."""
    links = [inst.links[k] for k in members]
    beta = inst.table.thresholds[list(rate_index)]
    g = inst.gains
    direct = np.array([g[i, j] for i, j in links])
    cross = np.array([[0.0 if a == b else g[links[b][0], links[a][1]]
                       for b in range(len(links))] for a in range(len(links))])
    scale = beta / direct
    noise, p_max = inst.phy.noise_mw, inst.phy.max_power_mw
    p = np.zeros(len(links))
    for _ in range(max_iter):
        nxt = scale * (noise + cross @ p)
        if np.any(nxt > p_max * (1 + 1e-12)):
            return None
        if np.all(np.abs(nxt - p) <= 1e-14 * nxt):
            return nxt
        p = nxt
    return None


def is_feasible(inst: TinyInstance, members, rate_index, powers) -> bool:
    """Direct check: node exclusivity, power box and SINR targets."""
    links = [inst.links[k] for k in members]
    if not node_exclusive(links):
        return False
    powers = np.asarray(powers, dtype=float)
    if len(powers) != len(links):
        return False
    if np.any(powers <= 0) or np.any(powers > inst.phy.max_power_mw * (1 + 1e-12)):
        return False
    g = inst.gains
    for a, (i, j) in enumerate(links):
        interference = sum(g[links[b][0], j] * powers[b] for b in range(len(links)) if b != a)
        achieved = g[i, j] * powers[a] / (inst.phy.noise_mw + interference)
        if achieved < inst.table.entries[rate_index[a]].threshold * (1 - SINR_TOL):
            return False
    return True


def objective(inst: TinyInstance, members, rate_index, pi: float = 1.0) -> float:
    per_bit = inst.phy.slot_duration / inst.phy.packet_bits
    return float(sum(inst.table.entries[n].rate * pi * per_bit + inst.weights[k]
                     for k, n in zip(members, rate_index)))


def optimal_schedule(inst: TinyInstance, pi: float = 1.0) -> OracleResult:
    if len(inst.links) > MAX_LINKS:
        raise ValueError(f"instance has {len(inst.links)} links; oracle limit is {MAX_LINKS}")
    best = OracleResult((), (), (), 0.0)
    n_rates = len(inst.table)
    for size in range(1, len(inst.links) + 1):
        for members in itertools.combinations(range(len(inst.links)), size):
            if not node_exclusive(inst.links[k] for k in members):
                continue
            candidates = sorted(
                ((objective(inst, members, r, pi), r)
                 for r in itertools.product(range(n_rates), repeat=size)),
                key=lambda c: (-c[0], c[1]))
            for value, rates in candidates:
                if value < best.objective:
                    break
                powers = fixed_point_powers(inst, members, rates)
                if powers is None or not is_feasible(inst, members, rates, powers):
                    continue
                if value > best.objective or (value == best.objective
                                              and (members, rates) < (best.links, best.rate_index)):
                    best = OracleResult(members, rates, tuple(powers), value)
                break
    return best
