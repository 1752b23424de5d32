"""Topology diagnostics: degree distributions, assortativity, power-law fit.

All metrics operate on a `GraphSnapshot` (degree per node plus the edge
list as index pairs); `NetworkState` objects are accepted anywhere a
snapshot is and converted on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import (
    DegenerateGraphError,
    InsufficientSupportError,
    UndefinedAssortativityError,
)
from .model import FEMALE, MALE, NetworkState

SUM_TOL = 1e-9


@dataclass(frozen=True)
class GraphSnapshot:
    """Immutable view of a graph: per-node degrees and (M, 2) edge indices."""

    degrees: np.ndarray
    edges: np.ndarray

    @classmethod
    def from_state(cls, state: NetworkState) -> "GraphSnapshot":
        return cls(degrees=state.degree.copy(), edges=state.edge_index_pairs())

    @classmethod
    def from_edge_pairs(cls, pairs: np.ndarray, n_nodes: Optional[int] = None) -> "GraphSnapshot":
        """Build from raw id pairs; ids are remapped densely when n_nodes is None."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if n_nodes is None:
            ids = np.unique(pairs)
            remap = {int(v): k for k, v in enumerate(ids)}
            pairs = np.array([[remap[int(u)], remap[int(v)]] for u, v in pairs],
                             dtype=np.int64).reshape(-1, 2)
            n_nodes = len(ids)
        degrees = np.bincount(pairs.ravel(), minlength=n_nodes).astype(np.int64)
        return cls(degrees=degrees, edges=pairs)


GraphLike = Union[GraphSnapshot, NetworkState]


def _as_snapshot(graph: GraphLike) -> GraphSnapshot:
    if isinstance(graph, GraphSnapshot):
        return graph
    return GraphSnapshot.from_state(graph)


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeDistribution:
    """p_k = n_k / N over all nodes, zero-degree nodes included."""

    n_nodes: int
    counts: Mapping[int, int]     # degree -> node count, only degrees present

    def p(self, k: int) -> float:
        return self.counts.get(k, 0) / self.n_nodes

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.counts))

    def mean(self) -> float:
        return sum(k * c for k, c in self.counts.items()) / self.n_nodes

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        ks = np.array(self.support(), dtype=np.int64)
        ns = np.array([self.counts[int(k)] for k in ks], dtype=np.int64)
        return ks, ns, ns / self.n_nodes

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "DegreeDistribution":
        n = sum(counts.values())
        if n <= 0:
            raise DegenerateGraphError("degree counts are empty")
        return cls(n_nodes=n, counts={int(k): int(c) for k, c in counts.items() if c > 0})


@dataclass(frozen=True)
class ExcessDegreeDistribution:
    """q_k: excess degree of a node reached along a uniformly random edge."""

    probs: Mapping[int, float]

    def q(self, k: int) -> float:
        return self.probs.get(k, 0.0)

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.probs))

    def mean(self) -> float:
        return sum(k * v for k, v in self.probs.items())

    def variance(self) -> float:
        mu = self.mean()
        return sum(k * k * v for k, v in self.probs.items()) - mu * mu


@dataclass(frozen=True)
class JointDegreeDistribution:
    """e_ij: excess degrees at the two ends of a uniformly random edge."""

    probs: Mapping[Tuple[int, int], float]
    n_edges: int

    def e(self, i: int, j: int) -> float:
        return self.probs.get((i, j), 0.0)

    def marginal(self) -> Dict[int, float]:
        out: Dict[int, float] = {}
        for (i, _j), v in self.probs.items():
            out[i] = out.get(i, 0.0) + v
        return out


def degree_distribution(graph: GraphLike) -> DegreeDistribution:
    snap = _as_snapshot(graph)
    n = len(snap.degrees)
    if n == 0:
        raise DegenerateGraphError("degree distribution of an empty network")
    ks, ns = np.unique(snap.degrees, return_counts=True)
    return DegreeDistribution(n_nodes=n, counts={int(k): int(c) for k, c in zip(ks, ns)})


def average_degree(graph: GraphLike) -> float:
    snap = _as_snapshot(graph)
    n = len(snap.degrees)
    if n == 0:
        raise DegenerateGraphError("average degree of an empty network")
    return 2.0 * len(snap.edges) / n


def excess_degree_distribution(p: DegreeDistribution) -> ExcessDegreeDistribution:
    norm = sum(k * c for k, c in p.counts.items())   # N * <k>
    if norm <= 0:
        raise DegenerateGraphError("excess degree distribution needs <k> > 0")
    probs = {k - 1: k * c / norm for k, c in p.counts.items() if k >= 1}
    return ExcessDegreeDistribution(probs=probs)


def joint_degree_distribution(graph: GraphLike) -> JointDegreeDistribution:
    """e_ij over excess-degree pairs, each undirected edge counted half per
    orientation so the matrix is exactly symmetric."""
    snap = _as_snapshot(graph)
    m = len(snap.edges)
    if m == 0:
        raise DegenerateGraphError("joint degree distribution needs at least one edge")
    exc_u = snap.degrees[snap.edges[:, 0]] - 1
    exc_v = snap.degrees[snap.edges[:, 1]] - 1
    probs: Dict[Tuple[int, int], float] = {}
    half = 0.5 / m
    for a, b in zip(exc_u, exc_v):
        a, b = int(a), int(b)
        probs[(a, b)] = probs.get((a, b), 0.0) + half
        probs[(b, a)] = probs.get((b, a), 0.0) + half
    return JointDegreeDistribution(probs=probs, n_edges=m)


def assortativity(graph: GraphLike) -> float:
    """Pearson correlation of excess degrees across edges.

    Raises UndefinedAssortativityError when the excess-degree variance is
    zero (regular graphs), which has no numeric answer.
    """
    snap = _as_snapshot(graph)
    if len(snap.edges) == 0:
        raise DegenerateGraphError("assortativity needs at least one edge")
    q = excess_degree_distribution(degree_distribution(snap))
    var = q.variance()
    if var <= SUM_TOL:
        raise UndefinedAssortativityError(
            "excess-degree variance is zero; assortativity undefined"
        )
    mu = q.mean()
    exc_u = snap.degrees[snap.edges[:, 0]] - 1.0
    exc_v = snap.degrees[snap.edges[:, 1]] - 1.0
    mean_prod = float(np.mean(exc_u * exc_v))   # symmetric by construction
    return (mean_prod - mu * mu) / var


# ---------------------------------------------------------------------------
# power-law fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerLawFit:
    """Log-log OLS fit p_k ~ A * k^-gamma with its goodness of fit."""

    gamma: float
    a: float
    r_squared: float
    points_used: int


def _fit_domain(p: DegreeDistribution) -> np.ndarray:
    """Degrees entering the fit: the contiguous run of occupied degrees from
    the smallest positive degree up to the first gap, minus single-count
    bins (which sit at the 1/N sampling floor rather than on the curve)."""
    ks = np.array([k for k in p.support() if k >= 1], dtype=np.int64)
    if len(ks) == 0:
        return ks
    end = ks[0]
    present = set(int(k) for k in ks)
    while end + 1 in present:
        end += 1
    prefix = np.arange(ks[0], end + 1)
    return prefix[np.array([p.counts[int(k)] > 1 for k in prefix])]


def fit_power_law(p: DegreeDistribution) -> PowerLawFit:
    """Ordinary least squares on (log10 k, log10 p_k).

    gamma is the negated slope, A is 10^intercept, and R^2 the coefficient
    of determination of the regression. Raises InsufficientSupportError
    with fewer than three usable points.
    """
    ks = _fit_domain(p)
    if len(ks) < 3:
        raise InsufficientSupportError(
            f"power-law fit needs >= 3 usable degree points, have {len(ks)}"
        )
    x = np.log10(ks.astype(np.float64))
    y = np.log10(np.array([p.p(int(k)) for k in ks]))
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(
        gamma=float(-slope),
        a=float(10.0 ** intercept),
        r_squared=float(r2),
        points_used=int(len(ks)),
    )


# ---------------------------------------------------------------------------
# whole-snapshot report
# ---------------------------------------------------------------------------

def bipartite_check(state: NetworkState) -> bool:
    """True iff every active edge joins a female to a male."""
    if state.M == 0:
        return True
    gender = state.population.gender
    return bool(
        np.all(gender[state.edge_females()] == FEMALE)
        and np.all(gender[state.edge_males()] == MALE)
    )


@dataclass(frozen=True)
class TopologyReport:
    """All topology metrics of one snapshot."""

    avg_degree: float
    assortativity: Optional[float]        # None when undefined (regular graph)
    sigma_sq_q: float
    degree_dist: DegreeDistribution
    excess_dist: ExcessDegreeDistribution
    joint_dist: JointDegreeDistribution
    fit: Optional[PowerLawFit]            # None when support is too small


def build_report(graph: GraphLike) -> TopologyReport:
    """Compute the full metric set for one snapshot.

    Graphs without edges raise; within-report degeneracies (regular graph,
    too few fit points) are carried as None fields rather than failing.
    """
    snap = _as_snapshot(graph)
    p = degree_distribution(snap)
    q = excess_degree_distribution(p)
    e = joint_degree_distribution(snap)
    try:
        r = assortativity(snap)
    except UndefinedAssortativityError:
        r = None
    try:
        fit = fit_power_law(p)
    except InsufficientSupportError:
        fit = None
    return TopologyReport(
        avg_degree=average_degree(snap),
        assortativity=r,
        sigma_sq_q=q.variance(),
        degree_dist=p,
        excess_dist=q,
        joint_dist=e,
        fit=fit,
    )
