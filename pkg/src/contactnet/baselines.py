"""Classic degree-proportional attachment generator, used as a validation
oracle for the power-law fitter and as a contrast to the fitness rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .topology import GraphSnapshot


@dataclass(frozen=True)
class BaNetwork:
    """A generated preferential-attachment graph."""

    n: int
    edges: np.ndarray      # (M, 2) node indices
    degrees: np.ndarray

    def snapshot(self) -> GraphSnapshot:
        return GraphSnapshot(degrees=self.degrees, edges=self.edges)


def generate_ba(n: int, m: int, m0: int, rng: np.random.Generator) -> BaNetwork:
    """Grow a graph where each new node links to m distinct existing nodes
    with probability proportional to their degree.

    The seed is a path over the first m0 nodes (connected, deterministic).
    Requires m < m0 <= n; the result has (m0 - 1) + m * (n - m0) edges,
    no self-loops, and no parallel edges.
    """
    if m < 1:
        raise ConfigError(f"m must be >= 1 (got {m})")
    if not m < m0 <= n:
        raise ConfigError(f"need m < m0 <= n (got m={m}, m0={m0}, n={n})")

    edges = [(i, i + 1) for i in range(m0 - 1)]
    # one entry per edge endpoint: sampling uniformly from this list is
    # sampling nodes proportionally to degree
    endpoint_pool = [node for edge in edges for node in edge]

    for new in range(m0, n):
        targets = set()
        while len(targets) < m:
            targets.add(endpoint_pool[rng.integers(len(endpoint_pool))])
        for t in sorted(targets):
            edges.append((new, t))
            endpoint_pool.append(new)
            endpoint_pool.append(t)

    edge_arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    degrees = np.bincount(edge_arr.ravel(), minlength=n).astype(np.int64)
    return BaNetwork(n=n, edges=edge_arr, degrees=degrees)
