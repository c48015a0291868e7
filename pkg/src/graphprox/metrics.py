"""Rand Index and Adjusted Rand Index between partitions.

Both indices are computed from the contingency table, with pair counts
held as exact Python integers so the largest products (sums of C(a,2)
squared) never overflow or round.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import LengthMismatch, TooFewNodes


def _as_labels(x) -> list[int]:
    labels = getattr(x, "labels", x)
    return [int(v) for v in labels]


@dataclass
class ContingencyTable:
    """counts[i][j] = size of (cluster i of X) intersect (cluster j of Y)."""

    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int


def contingency_table(x, y) -> ContingencyTable:
    """Cross-tabulate two partitions of the same node set.

    Accepts Partition objects or plain label sequences; labels need not
    be canonical.
    """
    xs, ys = _as_labels(x), _as_labels(y)
    if len(xs) != len(ys):
        raise LengthMismatch(f"label lengths differ: {len(xs)} vs {len(ys)}")
    _, xi = np.unique(xs, return_inverse=True)
    _, yi = np.unique(ys, return_inverse=True)
    kx = int(xi.max()) + 1 if len(xs) else 0
    ky = int(yi.max()) + 1 if len(ys) else 0
    counts = np.zeros((kx, ky), dtype=np.int64)
    np.add.at(counts, (xi, yi), 1)
    return ContingencyTable(
        counts=counts,
        row_sums=counts.sum(axis=1),
        col_sums=counts.sum(axis=0),
        n=len(xs),
    )


def _pair_sums(table: ContingencyTable) -> tuple[int, int, int]:
    together = sum(comb(int(v), 2) for v in table.counts.ravel())
    in_x = sum(comb(int(v), 2) for v in table.row_sums)
    in_y = sum(comb(int(v), 2) for v in table.col_sums)
    return together, in_x, in_y


def rand_index(x, y) -> float:
    """Fraction of node pairs on which the partitions agree."""
    table = contingency_table(x, y)
    if table.n < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {table.n}")
    together, in_x, in_y = _pair_sums(table)
    total = comb(table.n, 2)
    agreements = total + 2 * together - in_x - in_y
    return agreements / total


def adjusted_rand_index(x, y) -> float:
    """Hubert-Arabie ARI: (Index - Expected) / (Max - Expected).

    Index is the number of pairs co-clustered in both partitions,
    Expected its value under random labelings with the same cluster
    sizes, Max the average of the two within-partition pair counts.
    When Max equals Expected both partitions are all-singletons or
    all-in-one and identical, so 1.0 is returned.
    """
    table = contingency_table(x, y)
    if table.n < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {table.n}")
    index, in_x, in_y = _pair_sums(table)
    total = comb(table.n, 2)
    expected = in_x * in_y / total
    maximum = (in_x + in_y) / 2
    if maximum == expected:
        return 1.0
    return (index - expected) / (maximum - expected)
