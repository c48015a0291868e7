"""Ward agglomerative clustering and spectral clustering on kernels.

Both clusterers consume what the proximity kernels produce: Ward works
on the squared-distance matrix derived from a kernel, spectral works on
the kernel's top eigenvectors.  Everything is deterministic given its
inputs and seed; randomness only enters through k-means initialization
streams derived from (seed, restart index).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadK, EigFailure, MalformedDistance, NoConvergence
from .graphs import sym_eig
from .kernels import KernelMatrix

_TIE_EPS = 1e-12  # merge costs closer than this count as tied
_MAX_KMEANS_ITER = 300


@dataclass(eq=False)
class Partition:
    """Cluster labels for nodes 0..n-1, canonicalized by first occurrence.

    meta carries diagnostics (e.g. "degenerate_cut") and is ignored by
    equality.
    """

    labels: tuple[int, ...]
    k: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_labels(cls, raw, meta: dict | None = None) -> "Partition":
        mapping: dict = {}
        labels = []
        for label in raw:
            key = int(label)
            if key not in mapping:
                mapping[key] = len(mapping)
            labels.append(mapping[key])
        return cls(labels=tuple(labels), k=len(mapping), meta=meta or {})

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.labels == other.labels and self.k == other.k

    @property
    def n(self) -> int:
        return len(self.labels)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for label in self.labels:
            counts[label] += 1
        return counts

    def groups(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for node, label in enumerate(self.labels):
            out[label].append(node)
        return out


@dataclass(frozen=True)
class MergeStep:
    """One Ward merge: slot ids joined, its cost, resulting size."""

    left: int
    right: int
    cost: float
    size: int


def _validate_distance(d2: np.ndarray) -> np.ndarray:
    d2 = np.asarray(d2, dtype=float)
    if d2.ndim != 2 or d2.shape[0] != d2.shape[1]:
        raise MalformedDistance(f"expected square matrix, got shape {d2.shape}")
    if d2.size:
        if np.max(np.abs(d2 - d2.T)) > 1e-10:
            raise MalformedDistance("squared-distance matrix is not symmetric")
        if np.max(np.abs(np.diag(d2))) > 1e-12:
            raise MalformedDistance("squared-distance diagonal is not zero")
        if d2.min() < -1e-9:
            raise MalformedDistance(f"negative squared distance {d2.min()}")
    d2 = np.clip((d2 + d2.T) / 2.0, 0.0, None)
    np.fill_diagonal(d2, 0.0)
    return d2


def ward_cluster(d2, k: int) -> tuple[Partition, list[MergeStep]]:
    """Agglomerate n singletons down to k clusters, minimal-cost first.

    The merge cost between singletons {i},{j} is d2[i,j]/2 (the increase
    in within-cluster sum of squares when the two points join); after a
    merge, costs against every other cluster C are updated with the
    Lance-Williams recurrence

        cost(A+B, C) = [ (|A|+|C|) cost(A,C) + (|B|+|C|) cost(B,C)
                         - |C| cost(A,B) ] / (|A|+|B|+|C|)

    which keeps the costs exact for squared-Euclidean input.  Ties
    within 1e-12 are broken by the smallest (left, right) slot pair; a
    merged cluster keeps the smaller of the two slot ids.

    Returns the k-cluster partition and the full merge history.
    """
    d2 = _validate_distance(d2)
    n = d2.shape[0]
    if k < 1 or k > n:
        raise BadK(f"k must be in [1, {n}], got {k}")

    cost = d2 / 2.0
    np.fill_diagonal(cost, np.inf)
    sizes = np.ones(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    owner = np.arange(n)  # node -> slot id of its current cluster
    history: list[MergeStep] = []
    iu_rows, iu_cols = np.triu_indices(n, 1)

    for _ in range(n - k):
        # inactive slots carry +inf rows/cols, so a plain upper-triangle
        # scan finds the cheapest active pair; the first entry within
        # the tie window is the lexicographically smallest (i, j)
        upper = cost[iu_rows, iu_cols]
        best = upper.min()
        idx = int(np.flatnonzero(upper <= best + _TIE_EPS)[0])
        i, j = int(iu_rows[idx]), int(iu_cols[idx])

        delta = float(cost[i, j])
        si, sj = int(sizes[i]), int(sizes[j])
        history.append(MergeStep(left=i, right=j, cost=max(delta, 0.0), size=si + sj))

        others = active.copy()
        others[i] = others[j] = False
        so = sizes[others].astype(float)
        updated = (
            (si + so) * cost[i, others]
            + (sj + so) * cost[j, others]
            - so * delta
        ) / (si + sj + so)
        cost[i, others] = updated
        cost[others, i] = updated
        sizes[i] = si + sj
        active[j] = False
        cost[j, :] = np.inf
        cost[:, j] = np.inf
        owner[owner == j] = i

    return Partition.from_labels(owner), history


def _kmeans_once(points: np.ndarray, k: int, rng) -> tuple[np.ndarray, float]:
    """One k-means run: ++ seeding then Lloyd to fixpoint; returns
    (labels, inertia)."""
    n = points.shape[0]

    # k-means++ seeding
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    closest = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = float(closest.sum())
        if total <= 0.0:
            pick = int(rng.integers(n))
        else:
            pick = int(rng.choice(n, p=closest / total))
        centers[c] = points[pick]
        closest = np.minimum(closest, np.sum((points - centers[c]) ** 2, axis=1))

    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(_MAX_KMEANS_ITER):
        dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dists.argmin(axis=1)

        # repair empty clusters: reseed each to the point farthest
        # from its own center, in ascending cluster-id order; the point
        # is pinned to the new cluster so duplicate-point ties cannot
        # immediately re-empty it
        for c in range(k):
            if not np.any(new_labels == c):
                own = dists[np.arange(n), new_labels]
                far = int(own.argmax())
                centers[c] = points[far]
                dists[:, c] = np.sum((points - centers[c]) ** 2, axis=1)
                new_labels = dists.argmin(axis=1)
                new_labels[far] = c

        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = labels == c
            if np.any(members):
                centers[c] = points[members].mean(axis=0)

    inertia = float(((points - centers[labels]) ** 2).sum())
    return labels, inertia


def kmeans(points, k: int, seed: int, restarts: int = 10) -> Partition:
    """k-means with k-means++ starts; best of `restarts` runs by inertia.

    Each restart draws from an independent stream seeded by
    (seed, restart index); equal-inertia ties keep the lowest restart
    index, so results are reproducible for fixed inputs.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if k < 1 or k > n:
        raise BadK(f"k must be in [1, {n}], got {k}")
    if restarts < 1:
        raise BadK(f"restarts must be >= 1, got {restarts}")

    best_labels, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        labels, inertia = _kmeans_once(points, k, rng)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return Partition.from_labels(best_labels, meta={"inertia": best_inertia})


def spectral_cluster(
    kernel: KernelMatrix | np.ndarray, k: int, seed: int, restarts: int = 10
) -> Partition:
    """k-means on the kernel's top-k eigenvectors.

    The embedding is the n-by-k matrix of unit-norm eigenvector columns
    for the k largest eigenvalues (descending; ties keep ascending
    original position).  Rows are not normalized.  If the k-th and
    (k+1)-th eigenvalues coincide the cut is ambiguous; the partition is
    still returned but flagged with meta["degenerate_cut"] = True.
    """
    matrix = kernel.matrix if isinstance(kernel, KernelMatrix) else np.asarray(kernel)
    n = matrix.shape[0]
    if k < 1 or k > n:
        raise BadK(f"k must be in [1, {n}], got {k}")
    try:
        values, vectors = sym_eig(matrix)
    except NoConvergence as exc:
        raise EigFailure(str(exc)) from exc

    embedding = vectors[:, :k]
    part = kmeans(embedding, k, seed, restarts=restarts)
    if k < n:
        scale = max(1.0, abs(float(values[0])))
        if abs(float(values[k - 1] - values[k])) <= 1e-10 * scale:
            part.meta["degenerate_cut"] = True
    return part


# ---------------------------------------------------------------------------
# Partition file I/O: one "node cluster" line per node, sorted by node
# ---------------------------------------------------------------------------


def write_partition(part: Partition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for node, label in enumerate(part.labels):
            fh.write(f"{node} {label}\n")


def read_partition(path) -> Partition:
    entries: dict[int, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            node_s, label_s = line.split()[:2]
            node = int(node_s)
            if node in entries:
                raise ValueError(f"duplicate node {node} in partition file")
            entries[node] = int(label_s)
    if sorted(entries) != list(range(len(entries))):
        raise ValueError("partition file does not cover nodes 0..n-1")
    return Partition.from_labels([entries[i] for i in range(len(entries))])
