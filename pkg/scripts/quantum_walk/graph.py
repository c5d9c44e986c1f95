"""
Ring graph and single-walker tight-binding Hamiltonian.

The walk lives on an undirected ring with no loops and no multiple edges. The
Laplacian L = D - A doubles as the single-walker Hamiltonian when the on-site
potential equals the vertex degree and the hopping rate is one.
"""

from dataclasses import dataclass, field

import networkx as nx
import numpy as np


@dataclass(frozen=True)
class RingGraph:
    """Undirected graph given by its 0/1 adjacency matrix."""

    n_vertices: int
    adjacency: np.ndarray

    @property
    def degrees(self) -> list[int]:
        return [int(d) for d in self.adjacency.sum(axis=1)]


@dataclass(frozen=True)
class HoppingProfile:
    """Hopping rate ``mu`` and on-site potentials. ``onsite=None`` means the
    vertex degree, which is 2 everywhere on a ring."""

    mu: float = 1.0
    onsite: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"Hopping rate must be non-negative, got {self.mu}")
        if self.onsite is not None and not np.all(np.isreal(self.onsite)):
            raise ValueError("On-site potentials must be real")


def ring_graph(n: int) -> RingGraph:
    """
    Builds the ring graph on ``n`` vertices indexed 0..n-1, vertex i joined to
    i-1 and i+1 modulo n.

    Args:
        n (int): number of vertices, at least 3.

    Returns: RingGraph with a symmetric adjacency and every degree equal to 2.
    """
    if n < 3:
        raise ValueError(
            f"Degenerate ring: {n} vertices would need loops or multiple edges"
        )

    cycle = nx.cycle_graph(n)
    adjacency = nx.to_numpy_array(cycle, nodelist=range(n), dtype=int)

    return RingGraph(n_vertices=n, adjacency=adjacency)


def _adjacency(graph: RingGraph | np.ndarray) -> np.ndarray:
    """Accepts a RingGraph or a bare adjacency matrix and checks it describes
    a simple undirected graph."""
    adjacency = np.asarray(getattr(graph, "adjacency", graph))

    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise ValueError(f"Adjacency must be square, got shape {adjacency.shape}")
    if not np.array_equal(adjacency, adjacency.T):
        raise ValueError("Adjacency must be symmetric")
    if np.any(np.diag(adjacency) != 0):
        raise ValueError("Adjacency must have a zero diagonal (no loops)")
    if not np.all(np.isin(adjacency, (0, 1))):
        raise ValueError("Adjacency entries must be 0 or 1 (no multiple edges)")

    return adjacency


def laplacian(graph: RingGraph | np.ndarray) -> np.ndarray:
    """Graph Laplacian L = D - A as a real symmetric matrix."""
    adjacency = _adjacency(graph).astype(float)

    return np.diag(adjacency.sum(axis=1)) - adjacency


def single_walker_hamiltonian(
    graph: RingGraph | np.ndarray, profile: HoppingProfile = HoppingProfile()
) -> np.ndarray:
    """
    Tight-binding Hamiltonian H = sum_i eps_i |i><i| - mu sum_<i,j> (|i><j| + |j><i|).
    With eps_i = d_i and mu = 1 this is the Laplacian.

    Args:
        graph: RingGraph or adjacency matrix.
        profile (HoppingProfile): hopping rate and on-site potentials.

    Returns: np.ndarray of shape (n, n), real symmetric.
    """
    adjacency = _adjacency(graph).astype(float)
    n = adjacency.shape[0]

    # Default on-site potential is the vertex degree
    onsite = adjacency.sum(axis=1) if profile.onsite is None else profile.onsite
    onsite = np.asarray(onsite, dtype=float)
    if onsite.shape != (n,):
        raise ValueError(f"Expected {n} on-site potentials, got {onsite.shape}")

    return np.diag(onsite) - profile.mu * adjacency
