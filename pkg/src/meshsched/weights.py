"""Link weights: differential backlog and its fairness-oriented variants.

The base weight of link (i, j) is ``max_d Q_i^d - Q_j^d`` over gateways d,
and the maximising gateway is the commodity the link carries. The variants
divide by the link's cumulative allocated rate (total or per commodity)
and/or multiply by the head-of-line packet age:

    W      base
    Wr     W / R
    WD     D * W
    WrD    D / R * W
    Wrd    W / R_d
    WrdD   D / R_d * W

R counters are in units of the lowest table rate per slot and floored at 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConfigError

POLICIES = ("W", "Wr", "WD", "WrD", "Wrd", "WrdD")

# "WrD" and "Wrd" differ only in case, so matching is case-sensitive
_ALIASES = {p: p for p in POLICIES}
_ALIASES.update({
    "w": "W", "W_r": "Wr", "W_D": "WD", "W_rD": "WrD", "W_r,D": "WrD",
    "W_rd": "Wrd", "W_r_d": "Wrd", "W_rdD": "WrdD", "W_r_d,D": "WrdD",
})


def parse_policy(name: str) -> str:
    try:
        return _ALIASES[name.strip()]
    except KeyError:
        raise ConfigError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}") from None


def differential_backlog(q_i, q_j, gateways) -> tuple[float, int]:
    """Max queue difference over gateways and the gateway achieving it (lowest id on ties)."""
    best_k = max(range(len(gateways)), key=lambda k: (q_i[k] - q_j[k], -gateways[k]))
    return float(q_i[best_k] - q_j[best_k]), gateways[best_k]


def policy_weight(policy: str, w: float, hol_delay: float = 0.0,
                  rate_total: float = 0.0, rate_commodity: float = 0.0) -> float:
    if policy == "W":
        return w
    if policy == "Wr":
        return w / max(rate_total, 1.0)
    if policy == "WD":
        return hol_delay * w
    if policy == "WrD":
        return hol_delay / max(rate_total, 1.0) * w
    if policy == "Wrd":
        return w / max(rate_commodity, 1.0)
    if policy == "WrdD":
        return hol_delay / max(rate_commodity, 1.0) * w
    raise ConfigError(f"unknown policy {policy!r}")


@dataclass
class LinkWeights:
    """Per-slot weights over the topology's directed links (same order)."""

    value: np.ndarray       # policy weight
    base: np.ndarray        # differential backlog
    commodity: np.ndarray   # gateway index (into the gateway tuple)
    hol_delay: np.ndarray


class WeightState:
    """Cumulative allocated rate per link, total and per commodity."""

    def __init__(self, n_links: int, n_gateways: int, policy: str = "W",
                 rate_unit: float = 6e6):
        self.policy = parse_policy(policy)
        self.rate_unit = rate_unit
        self.total = np.zeros(n_links)
        self.per_gateway = np.zeros((n_links, n_gateways))

    def record(self, link: int, gw_index: int, rate: float, pi: float) -> None:
        step = rate / self.rate_unit * pi
        self.total[link] += step
        self.per_gateway[link, gw_index] += step

    def compute(self, lengths: np.ndarray, ages: np.ndarray, tx: np.ndarray,
                rx: np.ndarray) -> LinkWeights:
        """Weights for all links given queue lengths/ages indexed [node, gateway]."""
        diff = lengths[tx] - lengths[rx]
        # argmax returns the first maximum, i.e. the lowest gateway id
        commodity = np.argmax(diff, axis=1)
        rows = np.arange(len(tx))
        base = diff[rows, commodity].astype(float)
        delay = ages[tx, commodity]
        p = self.policy
        if p == "W":
            value = base
        elif p == "Wr":
            value = base / np.maximum(self.total, 1.0)
        elif p == "WD":
            value = delay * base
        elif p == "WrD":
            value = delay / np.maximum(self.total, 1.0) * base
        elif p == "Wrd":
            value = base / np.maximum(self.per_gateway[rows, commodity], 1.0)
        else:
            value = delay / np.maximum(self.per_gateway[rows, commodity], 1.0) * base
        return LinkWeights(value + 0.0, base, commodity, delay)
