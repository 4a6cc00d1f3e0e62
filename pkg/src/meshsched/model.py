"""Core network types, unit conversions and the log-distance channel model.

Internal units: powers in mW, gains dimensionless, rates in bit/s,
distances in m, time in s. dB/dBm only appear at config and report edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Invalid or unphysical configuration."""


def dbm_to_mw(x: float) -> float:
    return 10.0 ** (x / 10.0)


def mw_to_dbm(p: float) -> float:
    if p <= 0:
        raise ConfigError(f"power must be positive, got {p}")
    return 10.0 * math.log10(p)


def db_to_linear(x: float) -> float:
    return 10.0 ** (x / 10.0)


@dataclass(frozen=True)
class PhyConfig:
    """Physical-layer constants. Defaults reproduce the reference setup."""

    noise_mw: float = dbm_to_mw(-90.0)
    max_power_mw: float = dbm_to_mw(20.0)
    path_loss_exponent: float = 3.0
    reference_distance: float = 10.0
    slot_duration: float = 625e-6
    packet_bits: int = 1470 * 8

    def __post_init__(self):
        for name in ("noise_mw", "max_power_mw", "path_loss_exponent",
                     "reference_distance", "slot_duration", "packet_bits"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")

    @classmethod
    def from_conventional(cls, noise_dbm=-90.0, max_power_dbm=20.0, path_loss_exponent=3.0,
                          reference_distance=10.0, slot_us=625.0, packet_bytes=1470):
        return cls(
            noise_mw=dbm_to_mw(noise_dbm),
            max_power_mw=dbm_to_mw(max_power_dbm),
            path_loss_exponent=path_loss_exponent,
            reference_distance=reference_distance,
            slot_duration=slot_us * 1e-6,
            packet_bits=int(packet_bytes) * 8,
        )

    def packets_per_slot(self, rate: float) -> float:
        """Packets a link at ``rate`` bit/s carries in one full slot."""
        return rate * self.slot_duration / self.packet_bits


def channel_gain(pos_i, pos_j, phy: PhyConfig) -> float:
    d = math.dist(pos_i, pos_j)
    if d == 0.0:
        raise ConfigError(f"coincident node positions {tuple(pos_i)}")
    return (d / phy.reference_distance) ** (-phy.path_loss_exponent)


def gain_matrix(positions: np.ndarray, phy: PhyConfig) -> np.ndarray:
    """Dense pairwise gains; the diagonal is left at zero (unused)."""
    pos = np.asarray(positions, dtype=float)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    off = ~np.eye(len(pos), dtype=bool)
    if np.any(dist[off] == 0.0):
        raise ConfigError("coincident node positions")
    gains = np.zeros_like(dist)
    gains[off] = (dist[off] / phy.reference_distance) ** (-phy.path_loss_exponent)
    return gains


def sample_positions(n: int, side: float, seed: int) -> np.ndarray:
    """Uniform positions in a ``side`` x ``side`` square."""
    if n < 1 or side <= 0:
        raise ConfigError(f"need n >= 1 and side > 0, got n={n}, side={side}")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, side, size=(n, 2))


@dataclass(frozen=True)
class RateEntry:
    rate: float
    threshold_db: float

    @property
    def threshold(self) -> float:
        return db_to_linear(self.threshold_db)


# 802.11a rates (Mbps) and SINR thresholds (dB)
_DEFAULT_RATES = (
    (54, 24.56), (48, 24.05), (36, 18.8), (24, 17.04),
    (18, 10.79), (12, 9.03), (9, 7.78), (6, 6.02),
)


@dataclass(frozen=True)
class RateTable:
    """Discrete link rates sorted strictly descending, index 0 fastest."""

    entries: tuple[RateEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ConfigError("rate table is empty")
        for a, b in zip(self.entries, self.entries[1:]):
            if not a.rate > b.rate:
                raise ConfigError("rates must be strictly descending")
            if not a.threshold_db > b.threshold_db:
                raise ConfigError("thresholds must increase with rate")

    @classmethod
    def default(cls) -> "RateTable":
        return cls.from_pairs((r * 1e6, t) for r, t in _DEFAULT_RATES)

    @classmethod
    def from_pairs(cls, pairs) -> "RateTable":
        return cls(tuple(RateEntry(float(r), float(t)) for r, t in pairs))

    def __len__(self):
        return len(self.entries)

    @property
    def rates(self) -> np.ndarray:
        return np.array([e.rate for e in self.entries])

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([e.threshold for e in self.entries])

    @property
    def lowest_rate(self) -> float:
        return self.entries[-1].rate

    def index_of(self, rate: float) -> int:
        for k, e in enumerate(self.entries):
            if e.rate == rate:
                return k
        raise KeyError(f"rate {rate} not in table")

    def threshold_for(self, rate: float) -> float:
        return self.entries[self.index_of(rate)].threshold


@dataclass(frozen=True)
class Topology:
    """Positions, directed links and gains of a mesh. Node ids are 1-based.

    ``links`` holds both directions of every undirected edge, sorted.
    ``gains`` is indexed by 0-based node index (id - 1).
    """

    positions: np.ndarray
    links: tuple[tuple[int, int], ...]
    gains: np.ndarray
    gateways: tuple[int, ...]
    phy: PhyConfig = field(default_factory=PhyConfig)

    def __post_init__(self):
        n = len(self.positions)
        if not self.gateways:
            raise ConfigError("at least one gateway is required")
        if len(set(self.gateways)) >= n:
            raise ConfigError("gateways must be a strict subset of the nodes")
        for g in self.gateways:
            if not 1 <= g <= n:
                raise ConfigError(f"gateway id {g} out of range 1..{n}")
        present = set(self.links)
        for i, j in self.links:
            if i == j or not (1 <= i <= n and 1 <= j <= n):
                raise ConfigError(f"bad link ({i}, {j})")
            if (j, i) not in present:
                raise ConfigError(f"link ({i}, {j}) lacks its reverse")

    @property
    def n_nodes(self) -> int:
        return len(self.positions)

    @property
    def nodes(self) -> range:
        return range(1, self.n_nodes + 1)

    def gain(self, i: int, j: int) -> float:
        return float(self.gains[i - 1, j - 1])

    def neighbors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.links if a == i)

    def degree(self, i: int) -> int:
        return sum(1 for a, _ in self.links if a == i)

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def components(self) -> list[set[int]]:
        adj = {i: [] for i in self.nodes}
        for i, j in self.links:
            adj[i].append(j)
        seen, comps = set(), []
        for s in self.nodes:
            if s in seen:
                continue
            comp, stack = {s}, [s]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in comp:
                        comp.add(v)
                        stack.append(v)
            seen |= comp
            comps.append(comp)
        return comps

    def hop_distances(self, source: int) -> dict[int, int]:
        """BFS hop counts from ``source``."""
        adj = {i: self.neighbors(i) for i in self.nodes}
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        return dist
