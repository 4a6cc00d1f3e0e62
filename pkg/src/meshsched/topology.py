"""Initial topology: prune a full mesh to a bounded-degree graph.

Every node ranks the others by channel gain; mutually top-ranked pairs are
linked first, then low-degree nodes are attached to their preferred
neighbours in rounds of increasing target degree.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from .model import ConfigError, PhyConfig, Topology, gain_matrix


class DisconnectedTopology(ConfigError):
    """Constructed graph is not connected."""


def build_priorities(gains: np.ndarray) -> dict[int, list[int]]:
    """Per node, the other node ids by descending gain (ties: ascending id)."""
    n = len(gains)
    if n < 4:
        raise ConfigError(f"need at least 4 nodes for degree bounds, got {n}")
    prio = {}
    for i in range(n):
        others = [j for j in range(n) if j != i]
        others.sort(key=lambda j: (-gains[i, j], j))
        prio[i + 1] = [j + 1 for j in others]
    return prio


def degree_bounds(n: int) -> tuple[int, int]:
    k = n // 3
    return k, 2 * k


def mutual_priority_edges(priorities: dict[int, list[int]]) -> set[frozenset[int]]:
    """Pairs that are within each other's top floor(N/3) priorities."""
    k, _ = degree_bounds(len(priorities))
    return {frozenset((a, b)) for a, b in itertools.combinations(sorted(priorities), 2)
            if b in priorities[a][:k] and a in priorities[b][:k]}


def construct_edges(priorities: dict[int, list[int]]) -> set[frozenset[int]]:
    n = len(priorities)
    k, k_max = degree_bounds(n)
    edges: set[frozenset[int]] = set()
    deg = dict.fromkeys(priorities, 0)

    def connect(a, b):
        edges.add(frozenset((a, b)))
        deg[a] += 1
        deg[b] += 1

    nodes = sorted(priorities)
    for e in mutual_priority_edges(priorities):
        connect(*sorted(e))

    for target in range(k, k_max):
        for rank in range(k):
            for i in nodes:
                v = priorities[i][rank]
                if frozenset((i, v)) in edges:
                    continue
                # deg(i) guard keeps the upper bound 2*floor(N/3)
                if deg[v] == target and deg[i] < k_max:
                    connect(i, v)
    return edges


def construct_topology(positions, phy: PhyConfig, gateways, priorities=None,
                       require_connected: bool = True) -> Topology:
    positions = np.asarray(positions, dtype=float)
    gains = gain_matrix(positions, phy)
    if priorities is None:
        priorities = build_priorities(gains)
    edges = construct_edges(priorities)
    links = sorted(itertools.chain.from_iterable(
        ((a, b), (b, a)) for a, b in (sorted(e) for e in edges)))
    topo = Topology(positions=positions, links=tuple(links), gains=gains,
                    gateways=tuple(sorted(gateways)), phy=phy)
    if require_connected and not topo.is_connected():
        comps = sorted(sorted(c) for c in topo.components())
        raise DisconnectedTopology(f"topology is disconnected: components {comps}")
    return topo


def farthest_pair(positions) -> tuple[int, int]:
    """1-based ids of the two mutually farthest nodes (lexicographic ties)."""
    pos = np.asarray(positions, dtype=float)
    best, pair = -1.0, (1, 2)
    for a, b in itertools.combinations(range(len(pos)), 2):
        d = float(np.hypot(*(pos[a] - pos[b])))
        if d > best:
            best, pair = d, (a + 1, b + 1)
    return pair


def select_gateways(positions, mode="max-distance", ids=None) -> tuple[int, ...]:
    if mode == "max-distance":
        return farthest_pair(positions)
    if mode == "explicit":
        if not ids:
            raise ConfigError("explicit gateway mode needs ids")
        return tuple(sorted(int(g) for g in ids))
    raise ConfigError(f"unknown gateway mode {mode!r}")


def write_edge_list(topo: Topology, path) -> None:
    """One ``i j gain`` line per directed link; node/gateway data as comments."""
    lines = [f"# gateways {' '.join(map(str, topo.gateways))}"]
    for i, (x, y) in enumerate(topo.positions, start=1):
        lines.append(f"# node {i} {float(x)!r} {float(y)!r}")
    for i, j in topo.links:
        lines.append(f"{i} {j} {topo.gain(i, j)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path, phy: PhyConfig) -> Topology:
    positions, gateways, links = {}, None, []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "gateways":
                gateways = tuple(int(g) for g in parts[1:])
            elif parts and parts[0] == "node":
                positions[int(parts[1])] = (float(parts[2]), float(parts[3]))
            continue
        i, j, _gain = line.split()
        links.append((int(i), int(j)))
    if not positions or gateways is None:
        raise ConfigError(f"{path}: missing '# node' or '# gateways' header lines")
    if sorted(positions) != list(range(1, len(positions) + 1)):
        raise ConfigError(f"{path}: node ids must be 1..N")
    pos = np.array([positions[i] for i in range(1, len(positions) + 1)])
    # undirected edges listed once still produce both directions
    links = sorted(set(links) | {(j, i) for i, j in links})
    return Topology(positions=pos, links=tuple(links), gains=gain_matrix(pos, phy),
                    gateways=gateways, phy=phy)
