import numpy as np
import pytest

from graphprox import (
    BadK,
    EigFailure,
    Graph,
    MalformedDistance,
    Partition,
    adjacency_matrix,
    communicability_kernel,
    forest_kernel,
    heat_kernel,
    kernel_to_distance,
    kmeans,
    read_partition,
    spectral_cluster,
    spectral_radius,
    walk_kernel,
    ward_cluster,
    write_partition,
)


# ---------------------------------------------------------------------------
# Partition type
# ---------------------------------------------------------------------------


def test_partition_canonicalizes_by_first_occurrence():
    p = Partition.from_labels([5, 5, 2, 9, 2])
    assert p.labels == (0, 0, 1, 2, 1)
    assert p.k == 3
    assert p.sizes() == [2, 2, 1]
    assert p.groups() == [[0, 1], [2, 4], [3]]


def test_partition_equality_ignores_meta():
    a = Partition.from_labels([0, 1], meta={"inertia": 1.0})
    b = Partition.from_labels([0, 1], meta={"inertia": 2.0})
    assert a == b
    assert a != Partition.from_labels([0, 0])


def test_partition_file_round_trip(tmp_path):
    p = Partition.from_labels([0, 1, 1, 2])
    path = tmp_path / "part.txt"
    write_partition(p, path)
    assert read_partition(path) == p


def test_read_partition_requires_full_coverage(tmp_path):
    path = tmp_path / "part.txt"
    path.write_text("0 0\n2 1\n")  # node 1 missing
    with pytest.raises(ValueError):
        read_partition(path)
    path.write_text("0 0\n0 1\n")  # duplicate
    with pytest.raises(ValueError):
        read_partition(path)


# ---------------------------------------------------------------------------
# Ward
# ---------------------------------------------------------------------------


def test_ward_two_singletons_merge_cost():
    d2 = np.array([[0.0, 6.0], [6.0, 0.0]])
    part, history = ward_cluster(d2, 1)
    assert part.k == 1
    assert len(history) == 1
    assert history[0].cost == pytest.approx(3.0)  # d2 / 2
    assert history[0].size == 2


def test_ward_identity_when_k_equals_n():
    d2 = kernel_to_distance(np.eye(4) * 2.0)
    part, history = ward_cluster(d2, 4)
    assert part.labels == (0, 1, 2, 3)
    assert history == []


def test_ward_two_well_separated_pairs():
    d2 = np.full((4, 4), 100.0)
    np.fill_diagonal(d2, 0.0)
    d2[0, 1] = d2[1, 0] = 1.0
    d2[2, 3] = d2[3, 2] = 1.0
    part, _ = ward_cluster(d2, 2)
    assert part.labels == (0, 0, 1, 1)


def test_ward_bad_k():
    d2 = np.zeros((3, 3))
    with pytest.raises(BadK):
        ward_cluster(d2, 0)
    with pytest.raises(BadK):
        ward_cluster(d2, 4)


def test_ward_malformed_distance():
    with pytest.raises(MalformedDistance):
        ward_cluster(np.zeros((2, 3)), 1)
    asym = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(MalformedDistance):
        ward_cluster(asym, 1)
    dirty_diag = np.array([[1.0, 1.0], [1.0, 0.0]])
    with pytest.raises(MalformedDistance):
        ward_cluster(dirty_diag, 1)
    negative = np.array([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(MalformedDistance):
        ward_cluster(negative, 1)


def _reference_ward(points):
    """Greedy agglomeration straight from the centroid definition.

    delta(A, B) = |A||B| / (|A|+|B|) * ||mean(A) - mean(B)||^2, computed
    from scratch every step; same slot bookkeeping as ward_cluster
    (merge into the smaller id, ties by smallest pair).  Returns the
    merge list and the smallest cost gap seen between distinct pairs.
    """
    clusters = {i: [i] for i in range(len(points))}
    merges = []
    min_gap = np.inf
    while len(clusters) > 1:
        ids = sorted(clusters)
        costs = []
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                i, j = ids[a], ids[b]
                pa, pb = points[clusters[i]], points[clusters[j]]
                na, nb = len(pa), len(pb)
                gap2 = float(((pa.mean(axis=0) - pb.mean(axis=0)) ** 2).sum())
                costs.append((na * nb / (na + nb) * gap2, i, j))
        costs.sort()
        if len(costs) > 1:
            min_gap = min(min_gap, costs[1][0] - costs[0][0])
        cost, i, j = costs[0]
        merges.append((i, j, cost))
        clusters[i] = clusters[i] + clusters[j]
        del clusters[j]
    return merges, min_gap


def _embed(kernel_matrix):
    w, v = np.linalg.eigh(kernel_matrix)
    return v * np.sqrt(np.clip(w, 0.0, None))


def test_ward_agrees_with_centroid_reference():
    rng = np.random.default_rng(21)
    compared = 0
    for _ in range(25):
        n = int(rng.integers(4, 9))
        x = rng.normal(size=(n, 3))
        gram = x @ x.T
        points = _embed(gram)
        reference, min_gap = _reference_ward(points)
        if min_gap <= 1e-9:
            continue  # ties make the order genuinely ambiguous
        _, history = ward_cluster(kernel_to_distance(gram), 1)
        assert len(history) == len(reference)
        for step, (i, j, cost) in zip(history, reference):
            assert (step.left, step.right) == (i, j)
            assert step.cost == pytest.approx(cost, abs=1e-8)
        compared += 1
    assert compared >= 15  # the tie skip should be rare


def test_ward_costs_monotone_for_psd_input():
    rng = np.random.default_rng(22)
    x = rng.normal(size=(12, 4))
    d2 = kernel_to_distance(x @ x.T)
    _, history = ward_cluster(d2, 1)
    costs = [s.cost for s in history]
    assert all(b >= a - 1e-9 for a, b in zip(costs, costs[1:]))


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------


def test_kmeans_two_obvious_groups():
    points = np.array([0.0, 0.1, 10.0, 10.1])
    part = kmeans(points, 2, seed=0)
    assert part.labels == (0, 0, 1, 1)
    # brute force over the 7 contiguous-free splits confirms optimality
    best = min(
        (
            sum(
                ((points[list(group)] - points[list(group)].mean()) ** 2).sum()
                for group in (side, tuple(set(range(4)) - set(side)))
            ),
            side,
        )
        for side in [(0,), (1,), (2,), (3,), (0, 1), (0, 2), (0, 3)]
    )
    assert set(best[1]) in ({0, 1}, {2, 3})
    assert part.meta["inertia"] == pytest.approx(best[0])


def test_kmeans_identical_points():
    part = kmeans(np.zeros((5, 2)), 1, seed=3)
    assert part.k == 1
    assert part.meta["inertia"] == 0.0


def test_kmeans_deterministic():
    rng = np.random.default_rng(23)
    points = rng.normal(size=(30, 2))
    a = kmeans(points, 4, seed=9)
    b = kmeans(points, 4, seed=9)
    assert a.labels == b.labels
    assert a.meta["inertia"] == b.meta["inertia"]


def test_kmeans_fills_every_cluster():
    # more clusters than distinct locations: the empty-cluster repair
    # must still return k nonempty clusters
    points = np.array([[0.0, 0.0]] * 4 + [[1.0, 0.0]] * 4)
    part = kmeans(points, 3, seed=1)
    assert part.k == 3
    assert all(s > 0 for s in part.sizes())


def test_kmeans_bad_k():
    with pytest.raises(BadK):
        kmeans(np.zeros((3, 2)), 4, seed=0)
    with pytest.raises(BadK):
        kmeans(np.zeros((3, 2)), 0, seed=0)
    with pytest.raises(BadK):
        kmeans(np.zeros((3, 2)), 2, seed=0, restarts=0)


# ---------------------------------------------------------------------------
# Spectral
# ---------------------------------------------------------------------------


def test_spectral_block_kernel():
    k = np.zeros((6, 6))
    k[:3, :3] = 1.0
    k[3:, 3:] = 1.0
    part = spectral_cluster(k, 2, seed=0)
    assert part.labels == (0, 0, 0, 1, 1, 1)


def test_spectral_k1_trivial():
    part = spectral_cluster(np.eye(4), 1, seed=0)
    assert part.k == 1


def test_spectral_bad_inputs():
    with pytest.raises(BadK):
        spectral_cluster(np.eye(3), 5, seed=0)
    with pytest.raises(EigFailure):
        spectral_cluster(np.array([[0.0, 1.0], [0.0, 0.0]]), 1, seed=0)


def test_spectral_degenerate_cut_flagged():
    # two disjoint triangles: identical blocks, so the spectrum pairs up
    # and the k=1 cut lands inside a tie
    g = Graph.from_edge_list(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    k = forest_kernel(g, 1.0)
    part = spectral_cluster(k, 1, seed=0)
    assert part.meta.get("degenerate_cut") is True


def _random_connected(rng, n, p):
    while True:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        g = Graph.from_edge_list(n, pairs)
        if g.m and g.degree_sequence().min() >= 1:
            return g


def test_walk_comm_spectral_partitions_agree():
    # walk and communicability kernels share adjacency eigenvectors, so
    # spectral clustering cannot tell them apart (any valid alphas)
    rng = np.random.default_rng(24)
    for _ in range(5):
        g = _random_connected(rng, 12, 0.3)
        alpha = 0.4 / spectral_radius(adjacency_matrix(g))
        a = spectral_cluster(walk_kernel(g, alpha), 3, seed=5)
        b = spectral_cluster(communicability_kernel(g, 1.3), 3, seed=5)
        assert a == b


def test_forest_heat_spectral_partitions_agree():
    rng = np.random.default_rng(25)
    for _ in range(5):
        g = _random_connected(rng, 12, 0.3)
        a = spectral_cluster(forest_kernel(g, 0.7), 3, seed=5)
        b = spectral_cluster(heat_kernel(g, 2.1), 3, seed=5)
        assert a == b
