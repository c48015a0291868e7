"""Proximity kernels on graphs and their derived squared distances.

Five node-proximity measures are supported, all functions of one of
three symmetric base matrices:

    Walk            (I - alpha*A)^-1           0 < alpha < 1/q
    Communicability exp(alpha*A)               alpha > 0
    Forest          (I + alpha*L)^-1           alpha > 0
    Heat            exp(-alpha*L)              alpha > 0
    PageRank        (I - alpha*P)^-1           0 < alpha < 1

where A is the adjacency matrix, L = D - A the Laplacian, P = D^-1 A
the transition matrix and q the spectral radius of A.  Every kernel is
evaluated through a single symmetric eigendecomposition of its base
matrix, so sweeping many alpha values costs one factorization plus one
matrix product per alpha.  PageRank's P is not symmetric; it is handled
exactly through the similar symmetric matrix S = D^-1/2 A D^-1/2 and
the result symmetrized (see pagerank_kernel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AlphaOutOfRange, BadRange, IsolatedNode, NotPSD
from .graphs import Graph, adjacency_matrix, degrees, laplacian, sym_eig


class Measure(Enum):
    """The five proximity measures, with their short display names."""

    WALK = "Walk"
    COMM = "Comm"
    FOREST = "Forest"
    HEAT = "Heat"
    PAGERANK = "PR"

    @classmethod
    def parse(cls, name: str) -> "Measure":
        """Accept short or long spellings, case-insensitively."""
        aliases = {
            "walk": cls.WALK,
            "comm": cls.COMM,
            "communicability": cls.COMM,
            "forest": cls.FOREST,
            "heat": cls.HEAT,
            "pr": cls.PAGERANK,
            "pagerank": cls.PAGERANK,
        }
        key = name.strip().lower()
        if key not in aliases:
            raise ValueError(f"unknown measure {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class KernelParam:
    """Measure name, its alpha, and the open upper limit used to
    validate that alpha (1/q for Walk, 1 for PageRank, inf otherwise)."""

    measure: Measure
    alpha: float
    alpha_upper_bound: float


@dataclass
class KernelMatrix:
    """An n-by-n proximity matrix tagged with how it was built."""

    matrix: np.ndarray
    param: KernelParam

    @property
    def measure(self) -> Measure:
        return self.param.measure


# Walk resolvents within a relative margin of the 1/q pole are rejected:
# nearly singular (I - alpha*A) destroys positive semidefiniteness in
# floating point long before alpha reaches the pole itself.
_WALK_MARGIN = 1e-9


class KernelWorkspace:
    """Shared eigendecompositions of one graph's base matrices.

    Building a workspace is cheap; each base matrix (adjacency,
    Laplacian, normalized adjacency) is factorized once on first use
    and reused for every subsequent kernel evaluation on that graph.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self._adj_eig: tuple[np.ndarray, np.ndarray] | None = None
        self._lap_eig: tuple[np.ndarray, np.ndarray] | None = None
        self._nrm_eig: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    # -- cached factorizations ------------------------------------------

    def adjacency_eig(self) -> tuple[np.ndarray, np.ndarray]:
        if self._adj_eig is None:
            self._adj_eig = sym_eig(adjacency_matrix(self.graph))
        return self._adj_eig

    def laplacian_eig(self) -> tuple[np.ndarray, np.ndarray]:
        if self._lap_eig is None:
            self._lap_eig = sym_eig(laplacian(self.graph))
        return self._lap_eig

    def normalized_eig(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Eigensystem of S = D^-1/2 A D^-1/2 plus sqrt-degree vector."""
        if self._nrm_eig is None:
            d = degrees(self.graph)
            if np.any(d == 0):
                bad = int(np.flatnonzero(d == 0)[0])
                raise IsolatedNode(f"node {bad} has degree 0")
            root = np.sqrt(d.astype(float))
            s = adjacency_matrix(self.graph) / np.outer(root, root)
            values, vectors = sym_eig(s)
            self._nrm_eig = (values, vectors, root)
        return self._nrm_eig

    @property
    def adjacency_spectral_radius(self) -> float:
        if self.graph.n == 0:
            return 0.0
        values, _ = self.adjacency_eig()
        return float(np.max(np.abs(values)))

    # -- kernels ---------------------------------------------------------

    def alpha_upper_bound(self, measure: Measure) -> float:
        if measure is Measure.WALK:
            q = self.adjacency_spectral_radius
            return 1.0 / q if q > 0 else math.inf
        if measure is Measure.PAGERANK:
            return 1.0
        return math.inf

    def _check_alpha(self, measure: Measure, alpha: float) -> KernelParam:
        upper = self.alpha_upper_bound(measure)
        if not (alpha > 0):
            raise AlphaOutOfRange(f"{measure.value}: alpha must be > 0, got {alpha}")
        if measure is Measure.WALK and math.isfinite(upper):
            if alpha > (1.0 - _WALK_MARGIN) * upper:
                raise AlphaOutOfRange(
                    f"Walk: alpha {alpha} too close to or beyond 1/q = {upper}"
                )
        elif measure is Measure.PAGERANK and alpha >= 1.0:
            raise AlphaOutOfRange(f"PR: alpha must be < 1, got {alpha}")
        return KernelParam(measure, alpha, upper)

    def _spectral_map(self, measure: Measure, alpha: float) -> np.ndarray:
        if measure is Measure.WALK:
            values, vectors = self.adjacency_eig()
            weights = 1.0 / (1.0 - alpha * values)
        elif measure is Measure.COMM:
            values, vectors = self.adjacency_eig()
            weights = np.exp(alpha * values)
        elif measure is Measure.FOREST:
            values, vectors = self.laplacian_eig()
            weights = 1.0 / (1.0 + alpha * values)
        elif measure is Measure.HEAT:
            values, vectors = self.laplacian_eig()
            weights = np.exp(-alpha * values)
        else:
            raise ValueError(f"no spectral map for {measure}")
        k = (vectors * weights) @ vectors.T
        return (k + k.T) / 2.0

    def pagerank_resolvent(self, alpha: float) -> np.ndarray:
        """Raw R = (I - alpha*P)^-1, not symmetrized.

        Computed exactly through the symmetric similarity
        R = D^-1/2 (I - alpha*S)^-1 D^1/2.  Every row of R sums to
        1/(1 - alpha) because P is row-stochastic.
        """
        self._check_alpha(Measure.PAGERANK, alpha)
        values, vectors, root = self.normalized_eig()
        weights = 1.0 / (1.0 - alpha * values)
        middle = (vectors * weights) @ vectors.T
        # I - alpha*P = D^-1/2 (I - alpha*S) D^1/2, so the resolvent is
        # D^-1/2 (I - alpha*S)^-1 D^1/2
        return (middle / root[:, None]) * root[None, :]

    def kernel(self, measure: Measure, alpha: float) -> KernelMatrix:
        param = self._check_alpha(measure, alpha)
        if measure is Measure.PAGERANK:
            raw = self.pagerank_resolvent(alpha)
            matrix = (raw + raw.T) / 2.0
        else:
            matrix = self._spectral_map(measure, alpha)
        return KernelMatrix(matrix=matrix, param=param)


# ---------------------------------------------------------------------------
# One-shot convenience wrappers
# ---------------------------------------------------------------------------


def walk_kernel(g: Graph, alpha: float) -> KernelMatrix:
    """(I - alpha*A)^-1 for 0 < alpha < 1/q."""
    return KernelWorkspace(g).kernel(Measure.WALK, alpha)


def communicability_kernel(g: Graph, alpha: float) -> KernelMatrix:
    """exp(alpha*A) for alpha > 0."""
    return KernelWorkspace(g).kernel(Measure.COMM, alpha)


def forest_kernel(g: Graph, alpha: float) -> KernelMatrix:
    """(I + alpha*L)^-1 for alpha > 0; rows sum to 1."""
    return KernelWorkspace(g).kernel(Measure.FOREST, alpha)


def heat_kernel(g: Graph, alpha: float) -> KernelMatrix:
    """exp(-alpha*L) for alpha > 0; rows sum to 1."""
    return KernelWorkspace(g).kernel(Measure.HEAT, alpha)


def pagerank_kernel(g: Graph, alpha: float) -> KernelMatrix:
    """Symmetrized (R + R^T)/2 with R = (I - alpha*P)^-1, 0 < alpha < 1."""
    return KernelWorkspace(g).kernel(Measure.PAGERANK, alpha)


def pagerank_resolvent(g: Graph, alpha: float) -> np.ndarray:
    """Raw, unsymmetrized PageRank resolvent (rows sum to 1/(1-alpha))."""
    return KernelWorkspace(g).pagerank_resolvent(alpha)


def kernel_to_distance(kernel: KernelMatrix | np.ndarray) -> np.ndarray:
    """Squared distances d2[i,j] = K[i,i] + K[j,j] - 2*K[i,j].

    For a positive semidefinite K this is the squared Euclidean distance
    between the embedded points of the Gram matrix.  Round-off negatives
    above -1e-9 are clamped to zero; anything lower means K was not PSD.

    Raises:
        NotPSD: if any squared distance falls below -1e-9.
    """
    matrix = kernel.matrix if isinstance(kernel, KernelMatrix) else np.asarray(kernel)
    diag = np.diag(matrix)
    d2 = diag[:, None] + diag[None, :] - 2.0 * matrix
    d2 = (d2 + d2.T) / 2.0
    low = float(d2.min()) if d2.size else 0.0
    if low < -1e-9:
        raise NotPSD(f"squared distance {low} below -1e-9; kernel is not PSD")
    np.clip(d2, 0.0, None, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def interior_grid(upper: float, points: int) -> list[float]:
    """Evenly spaced interior points i*upper/(points+1), i = 1..points."""
    if points < 1:
        raise BadRange(f"points must be >= 1, got {points}")
    if not (upper > 0) or not math.isfinite(upper):
        raise BadRange(f"upper bound must be finite and > 0, got {upper}")
    step = upper / (points + 1)
    return [i * step for i in range(1, points + 1)]


def alpha_grid(
    measure: Measure, g: Graph, points: int, alpha_max: float = 10.0
) -> list[float]:
    """Evenly spaced interior alphas of the measure's valid interval.

    Walk uses (0, 1/q); PageRank uses (0, 1); the unbounded measures
    (Comm, Forest, Heat) use (0, alpha_max].  Endpoints are excluded:
    the grid is i*upper/(points+1) for i = 1..points, which matches
    e.g. PageRank with points=3 -> [0.25, 0.5, 0.75].  For an empty
    graph the Walk interval is unbounded and alpha_max is used.
    """
    upper = KernelWorkspace(g).alpha_upper_bound(measure)
    if not math.isfinite(upper):
        upper = alpha_max
    return interior_grid(upper, points)


def write_kernel_csv(kernel: KernelMatrix | np.ndarray, path) -> None:
    """Dump a kernel as plain CSV: n rows of n comma-separated values,
    12 significant digits, no header."""
    matrix = kernel.matrix if isinstance(kernel, KernelMatrix) else np.asarray(kernel)
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
