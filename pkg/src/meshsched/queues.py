"""Per-node, per-gateway FIFO packet queues."""

from __future__ import annotations

from collections import deque

import numpy as np

from .traffic import Packet


class QueueState:
    """FIFOs indexed by (node id, gateway). A gateway's own queue stays empty."""

    def __init__(self, n_nodes: int, gateways):
        self.gateways = tuple(gateways)
        self.gw_index = {g: k for k, g in enumerate(self.gateways)}
        self.n_nodes = n_nodes
        self.fifos = [[deque() for _ in self.gateways] for _ in range(n_nodes + 1)]
        # row 0 unused so rows line up with 1-based node ids
        self.lengths = np.zeros((n_nodes + 1, len(self.gateways)), dtype=np.int64)

    def push(self, node: int, pkt: Packet) -> None:
        if node == pkt.dest:
            raise RuntimeError(f"packet for gateway {node} queued at its own sink")
        k = self.gw_index[pkt.dest]
        self.fifos[node][k].append(pkt)
        self.lengths[node, k] += 1

    def pop(self, node: int, gateway: int) -> Packet:
        k = self.gw_index[gateway]
        self.lengths[node, k] -= 1
        return self.fifos[node][k].popleft()

    def length(self, node: int, gateway: int) -> int:
        return int(self.lengths[node, self.gw_index[gateway]])

    def node_lengths(self, node: int) -> np.ndarray:
        return self.lengths[node]

    def head_created(self, node: int, gateway: int):
        fifo = self.fifos[node][self.gw_index[gateway]]
        return fifo[0].created if fifo else None

    def head_ages(self, t: int) -> np.ndarray:
        """Age in slots of each head-of-line packet; 0 for empty queues."""
        ages = np.zeros(self.lengths.shape, dtype=float)
        for i in range(1, self.n_nodes + 1):
            for k, fifo in enumerate(self.fifos[i]):
                if fifo:
                    ages[i, k] = t - fifo[0].created
        return ages

    def total(self) -> int:
        return int(self.lengths.sum())

    def packets(self):
        for row in self.fifos:
            for fifo in row:
                yield from fifo
