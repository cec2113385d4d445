"""Undirected communication topology among vehicles and its spectral properties.

The formation controller couples vehicles through the graph Laplacian
L = D - A.  For a connected graph, 0 is a simple Laplacian eigenvalue with
the all-ones eigenvector; adding a rank >= 1 nonnegative diagonal pinning
term makes the coupled matrix L (x) C1 + B (x) C2 positive definite.  Those
two facts are what the stability checks in the rest of the package rely on.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphError

# Eigenvalues below this (relative to matrix scale) are treated as zero.
ZERO_EIG_TOL = 1e-9


@dataclass(frozen=True)
class FormationGraph:
    """Undirected, unweighted topology on n >= 2 vehicles."""

    n: int
    adjacency: np.ndarray
    neighbor_lists: tuple = field(init=False, repr=False)

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if self.n < 2:
            raise GraphError(f"need at least 2 vehicles, got n={self.n}")
        if a.shape != (self.n, self.n):
            raise GraphError(f"adjacency shape {a.shape} does not match n={self.n}")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0.0):
            raise GraphError("adjacency diagonal must be zero (no self loops)")
        if not np.all(np.isin(a, (0.0, 1.0))):
            raise GraphError("adjacency entries must be 0 or 1")
        object.__setattr__(self, "adjacency", a)
        nbrs = tuple(tuple(int(j) for j in np.flatnonzero(a[i])) for i in range(self.n))
        object.__setattr__(self, "neighbor_lists", nbrs)

    def neighbors(self, i: int) -> tuple:
        return self.neighbor_lists[i]


@dataclass(frozen=True)
class PinningMatrix:
    """Nonnegative diagonal matrix selecting vehicles with reference access."""

    diag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        if d.ndim != 1:
            raise GraphError("pinning diagonal must be a vector")
        if np.any(d < 0.0):
            raise GraphError("pinning entries must be nonnegative")
        object.__setattr__(self, "diag", d)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.diag))


def build_graph(n: int, edges) -> FormationGraph:
    """Build the topology from a list of 0-based (i, j) pairs."""
    a = np.zeros((n, n))
    for i, j in edges:
        if i == j:
            raise GraphError(f"self-loop edge ({i}, {j}) is not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        a[i, j] = a[j, i] = 1.0
    return FormationGraph(n=n, adjacency=a)


def degree_vector(g: FormationGraph) -> np.ndarray:
    return g.adjacency.sum(axis=1)


def laplacian(g: FormationGraph) -> np.ndarray:
    return np.diag(degree_vector(g)) - g.adjacency


def is_connected(g: FormationGraph) -> bool:
    """Breadth-first reachability from node 0."""
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in g.neighbors(i):
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == g.n


def coupling_min_eigenvalue(
    g: FormationGraph,
    pinning: PinningMatrix,
    c1: np.ndarray,
    c2: np.ndarray,
) -> float:
    """Minimum eigenvalue of L (x) C1 + B (x) C2.

    c1 and c2 are the diagonal entries of positive diagonal coupling
    matrices (length m, typically 3).  Strictly positive for a connected
    graph with a rank >= 1 pinning matrix.
    """
    if pinning.diag.shape != (g.n,):
        raise GraphError("pinning length must match vehicle count")
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if np.any(c1 <= 0.0) or np.any(c2 <= 0.0):
        raise GraphError("coupling diagonals must be strictly positive")
    if not is_connected(g):
        raise GraphError("coupled positive definiteness requires a connected graph")
    if pinning.rank < 1:
        warnings.warn(
            "pinning matrix has rank 0; coupled matrix is only positive semidefinite",
            stacklevel=2,
        )
    m = np.kron(laplacian(g), np.diag(c1)) + np.kron(np.diag(pinning.diag), np.diag(c2))
    return float(np.linalg.eigvalsh(m)[0])
