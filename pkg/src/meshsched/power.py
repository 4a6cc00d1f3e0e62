"""Minimum transmit powers for a set of concurrent links.

With every SINR constraint tightened to equality, the powers of a
node-disjoint link set solve the linear system ``A p = N0 1`` where

    A[k, k] = G(i_k, j_k) / beta_k
    A[k, n] = -G(i_n, j_k)          (n != k)

A set is usable only if the solution lies in ``(0, P_max]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import RateTable, Topology

MAX_CONDITION = 1e12


class InvalidCandidate(ValueError):
    """Links in a candidate set share a node."""


class Status(enum.Enum):
    OK = "ok"
    SINGULAR = "singular"
    ILL_CONDITIONED = "ill-conditioned"
    NONPOSITIVE = "nonpositive-power"
    OVER_MAX = "power-above-max"


@dataclass(frozen=True)
class PowerSolution:
    status: Status
    powers: np.ndarray | None = None
    condition: float = float("nan")

    @property
    def feasible(self) -> bool:
        return self.status is Status.OK


def check_node_disjoint(links) -> None:
    seen = set()
    for i, j in links:
        if i in seen or j in seen or i == j:
            raise InvalidCandidate(f"link ({i}, {j}) shares a node with another member")
        seen.update((i, j))


def gain_matrix_from_indices(gains: np.ndarray, tx, rx, thresholds) -> np.ndarray:
    """System matrix from 0-based transmitter/receiver indices."""
    tx = np.asarray(tx)
    rx = np.asarray(rx)
    a = -gains[np.ix_(rx, tx)]
    direct = gains[rx, tx]
    a[np.diag_indices_from(a)] = direct / np.asarray(thresholds, dtype=float)
    return a


def build_gain_matrix(links, rates, topo: Topology, table: RateTable) -> np.ndarray:
    """System matrix for directed ``links`` (1-based ids) at the given rates (bit/s)."""
    links = list(links)
    if not links:
        raise InvalidCandidate("empty candidate set")
    check_node_disjoint(links)
    tx = [i - 1 for i, _ in links]
    rx = [j - 1 for _, j in links]
    beta = [table.threshold_for(r) for r in rates]
    return gain_matrix_from_indices(topo.gains, tx, rx, beta)


def solve_powers(a: np.ndarray, noise: float, p_max: float | None = None) -> PowerSolution:
    """Solve ``a p = noise * 1``; judge against ``(0, p_max]`` when ``p_max`` is given."""
    a = np.asarray(a, dtype=float)
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        return PowerSolution(Status.SINGULAR)
    cond = float(np.abs(a).sum(axis=0).max() * np.abs(inv).sum(axis=0).max())
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        return PowerSolution(Status.ILL_CONDITIONED, condition=cond)
    p = noise * inv.sum(axis=1)
    if p_max is not None:
        if np.any(p <= 0.0):
            return PowerSolution(Status.NONPOSITIVE, p, cond)
        if np.any(p > p_max):
            return PowerSolution(Status.OVER_MAX, p, cond)
    return PowerSolution(Status.OK, p, cond)


def sinr(links, powers, gains: np.ndarray, noise: float) -> np.ndarray:
    """Achieved SINR per link, links given as 0-based (tx, rx) pairs."""
    powers = np.asarray(powers, dtype=float)
    out = np.empty(len(links))
    for k, (i, j) in enumerate(links):
        interference = sum(gains[p, j] * powers[n]
                           for n, (p, _) in enumerate(links) if n != k)
        out[k] = gains[i, j] * powers[k] / (noise + interference)
    return out


def verify_sinr(links, powers, topo: Topology, table: RateTable, rates,
                noise: float | None = None) -> np.ndarray:
    """Residuals ``SINR / beta - 1``; non-negative means the constraint holds."""
    noise = topo.phy.noise_mw if noise is None else noise
    zero_based = [(i - 1, j - 1) for i, j in links]
    beta = np.array([table.threshold_for(r) for r in rates])
    return sinr(zero_based, powers, topo.gains, noise) / beta - 1.0
