"""Undirected simple graphs and their standard matrices.

A Graph is an immutable value: a node count plus a canonically sorted
tuple of edges (i, j) with i < j.  All matrix representations are dense
numpy arrays; the package targets the small-to-medium graphs (up to a
few thousand nodes) where dense linear algebra is the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange, IsolatedNode, NoConvergence, SelfLoop


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_edge_list(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph from (possibly messy) node pairs.

        Pairs may appear in either orientation and may repeat; they are
        normalized to i < j, deduplicated and sorted.  Self-loops and
        out-of-range indices are rejected.

        Args:
            n: number of nodes; must be >= 0.
            pairs: iterable of 2-sequences of node indices.

        Returns:
            A canonical Graph.
        """
        if n < 0:
            raise IndexOutOfRange(f"node count must be >= 0, got {n}")
        seen = set()
        for pair in pairs:
            i, j = int(pair[0]), int(pair[1])
            if i == j:
                raise SelfLoop(f"edge ({i}, {j}) is a self-loop")
            if not (0 <= i < n) or not (0 <= j < n):
                raise IndexOutOfRange(f"edge ({i}, {j}) outside 0..{n - 1}")
            if i > j:
                i, j = j, i
            seen.add((i, j))
        return cls(n=n, edges=tuple(sorted(seen)))

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.edges)

    def degree_sequence(self) -> np.ndarray:
        return degrees(self)


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Dense symmetric 0/1 adjacency matrix with zero diagonal."""
    a = np.zeros((g.n, g.n), dtype=float)
    for i, j in g.edges:
        a[i, j] = 1.0
        a[j, i] = 1.0
    return a


def degrees(g: Graph) -> np.ndarray:
    """Integer degree of every node."""
    d = np.zeros(g.n, dtype=np.int64)
    for i, j in g.edges:
        d[i] += 1
        d[j] += 1
    return d


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian L = D - A."""
    a = adjacency_matrix(g)
    return np.diag(a.sum(axis=1)) - a


def markov_matrix(g: Graph) -> np.ndarray:
    """Row-stochastic transition matrix P = D^-1 A.

    Raises:
        IsolatedNode: if any node has degree zero (its row cannot be
            normalized to sum 1).
    """
    d = degrees(g)
    if np.any(d == 0):
        bad = int(np.flatnonzero(d == 0)[0])
        raise IsolatedNode(f"node {bad} has degree 0")
    return adjacency_matrix(g) / d[:, None].astype(float)


def sym_eig(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Returns (values, vectors) with vectors[:, i] the unit eigenvector of
    values[i].  Ties between equal eigenvalues keep ascending original
    index order (stable sort), so the output is fully deterministic.

    Raises:
        NoConvergence: if the input is visibly asymmetric or LAPACK fails.
    """
    matrix = np.asarray(matrix, dtype=float)
    skew = np.max(np.abs(matrix - matrix.T)) if matrix.size else 0.0
    if skew > 1e-10:
        raise NoConvergence(f"matrix is not symmetric (max skew {skew:.3e})")
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def spectral_radius(matrix: np.ndarray) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    if np.asarray(matrix).size == 0:
        return 0.0
    values, _ = sym_eig(matrix)
    return float(np.max(np.abs(values)))


# ---------------------------------------------------------------------------
# Edge list text I/O
# ---------------------------------------------------------------------------


def write_edge_list(g: Graph, path) -> None:
    """Write one 'i j' line per edge in canonical order, with a header
    comment recording the node count (so isolated trailing nodes survive
    a round trip)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes: {g.n}\n")
        for i, j in g.edges:
            fh.write(f"{i} {j}\n")


def read_edge_list(path, n: int | None = None) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with '#' are comments; a comment of the form
    '# nodes: N' pins the node count.  An explicit n argument wins over
    both the header and the max-index-plus-one fallback.
    """
    header_n: int | None = None
    pairs: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.lower().startswith("nodes:"):
                    header_n = int(body.split(":", 1)[1])
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"malformed edge line: {line!r}")
            pairs.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = header_n
    if n is None:
        n = 1 + max((max(i, j) for i, j in pairs), default=-1)
    return Graph.from_edge_list(n, pairs)


def read_edge_list_labeled(path) -> tuple[Graph, dict[str, int]]:
    """Read an edge list whose node labels are arbitrary tokens.

    Labels are remapped to 0-based contiguous indices in order of first
    appearance; the mapping is returned alongside the graph.
    """
    mapping: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"malformed edge line: {line!r}")
            ids = []
            for token in parts[:2]:
                if token not in mapping:
                    mapping[token] = len(mapping)
                ids.append(mapping[token])
            pairs.append((ids[0], ids[1]))
    return Graph.from_edge_list(len(mapping), pairs), mapping
