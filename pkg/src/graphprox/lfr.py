"""LFR benchmark graphs with ground-truth communities.

The generator follows the standard LFR pipeline: sample a power-law
degree sequence, sample power-law community sizes, assign nodes to
communities, wire internal and external edges by configuration-model
stub matching, then repair self-loops, duplicate edges and
within-community "external" edges by degree-preserving edge swaps.
Every step draws from one deterministic stream per attempt, so a
(params, seed) pair always yields the same graph.

A few practical details matter for hitting the advertised tolerances:

* Internal degrees are rounded half-up from (1 - mu) * degree.  Plain
  ceiling would push the realized mixing fraction far below its target
  at moderate degrees, because ceil leaves low-degree nodes with zero
  external stubs.
* The degree cap is min(n - 1, 3 * m * ceil(ln n)), further limited so
  every node's internal degree fits inside the smallest community;
  without that limit heavy-tailed draws at high m are unassignable and
  generation would always exhaust its retries.
* After sampling, degrees are nudged one unit at a time (random
  eligible node) until the sequence mean sits within 2% of m.  Integer
  bounds alone cannot always reach that band -- with m = 2 even the
  minimal support [1, kmax] overshoots the mean -- so the nudge is what
  makes the contract unconditional.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .clustering import Partition, write_partition
from .errors import BadRange, GenerationFailed, Infeasible
from .graphs import Graph, degrees, write_edge_list


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class LfrParams:
    """The seven generation knobs plus seeding/retry policy.

    Defaults are the benchmark's base configuration: 300 nodes, average
    degree 5, degree exponent 2.5, size exponent 1.5, community sizes
    in [80, 140], mixing fraction 0.2.
    """

    n: int = 300
    m: float = 5.0
    tau1: float = 2.5
    tau2: float = 1.5
    cmin: int = 80
    cmax: int = 140
    mu: float = 0.2
    seed: int = 0
    max_retries: int = 20

    def check(self) -> None:
        if self.n <= 0:
            raise BadRange(f"n must be positive, got {self.n}")
        if self.m < 1:
            raise BadRange(f"m must be >= 1, got {self.m}")
        if not (0.0 <= self.mu <= 1.0):
            raise BadRange(f"mu must be in [0, 1], got {self.mu}")
        if not (1 <= self.cmin <= self.cmax <= self.n):
            raise BadRange(
                f"need 1 <= cmin <= cmax <= n, got cmin={self.cmin} "
                f"cmax={self.cmax} n={self.n}"
            )
        if self.max_retries < 1:
            raise BadRange(f"max_retries must be >= 1, got {self.max_retries}")
        if not (2.0 <= self.tau1 <= 3.0):
            warnings.warn(f"tau1={self.tau1} outside the typical range [2, 3]")
        if not (1.0 <= self.tau2 <= 2.0):
            warnings.warn(f"tau2={self.tau2} outside the typical range [1, 2]")


@dataclass(frozen=True)
class GenerationReport:
    """Realized properties of one generated graph."""

    avg_degree: float
    mu: float
    community_sizes: tuple[int, ...]
    retries: int
    kmin: int
    kmax: int
    edge_count: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["community_sizes"] = list(self.community_sizes)
        return d


@dataclass
class LfrOutput:
    graph: Graph
    ground_truth: Partition
    realized: GenerationReport


@dataclass(frozen=True)
class ValidationReport:
    """Report-only checks against the requested parameters."""

    simple_ok: bool
    sizes_ok: bool
    mu_ok: bool
    degree_ok: bool
    isolated_count: int
    measured_mu: float
    measured_avg_degree: float
    community_sizes: tuple[int, ...]

    @property
    def passed(self) -> bool:
        # isolated nodes are flagged, not failed
        return self.simple_ok and self.sizes_ok and self.mu_ok and self.degree_ok


class _AttemptFailed(Exception):
    """Internal: abandon this attempt, reseed, try again."""


# ---------------------------------------------------------------------------
# Power-law sampling
# ---------------------------------------------------------------------------


def _plaw_ppf(u, lo: float, hi: float, gamma: float):
    """Inverse CDF of the continuous power law p(x) ~ x^-gamma on [lo, hi]."""
    if gamma == 1.0:
        return lo * (hi / lo) ** u
    e = 1.0 - gamma
    return (lo**e + u * (hi**e - lo**e)) ** (1.0 / e)


def _plaw_mass(lo: float, hi: float, gamma: float) -> float:
    """Unnormalized integral of x^-gamma over [lo, hi]."""
    if gamma == 1.0:
        return math.log(hi) - math.log(lo)
    e = 1.0 - gamma
    return (hi**e - lo**e) / e


def _sample_power_law_rng(rng, exponent: float, xmin: int, xmax: int, count: int):
    u = rng.random(count)
    x = _plaw_ppf(u, xmin - 0.5, xmax + 0.5, exponent)
    return np.floor(x + 0.5).astype(np.int64)


def sample_power_law(
    exponent: float, xmin: int, xmax: int, count: int, seed: int
) -> np.ndarray:
    """Integer draws with p(x) ~ x^-exponent on [xmin, xmax].

    Sampling inverts the CDF of the continuous relaxation on
    [xmin - 1/2, xmax + 1/2] and rounds half-up, which reproduces the
    discrete truncated power law closely (means agree within a few
    percent across the exponent range used here).  Deterministic for a
    given seed.

    Raises:
        BadRange: if xmin > xmax, xmin < 1, exponent < 1 or count < 0.
    """
    if xmin > xmax:
        raise BadRange(f"xmin {xmin} > xmax {xmax}")
    if xmin < 1:
        raise BadRange(f"xmin must be >= 1, got {xmin}")
    if exponent < 1.0:
        raise BadRange(f"exponent must be >= 1, got {exponent}")
    if count < 0:
        raise BadRange(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    return _sample_power_law_rng(rng, exponent, xmin, xmax, count)


def _rounded_mean(gamma: float, xmin: int, xmax: int) -> float:
    """Analytic mean of the rounded continuous power-law sampler."""
    lo, hi = xmin - 0.5, xmax + 0.5
    ks = np.arange(xmin, xmax + 1)
    masses = np.array([_plaw_mass(k - 0.5, k + 0.5, gamma) for k in ks])
    total = _plaw_mass(lo, hi, gamma)
    return float((ks * masses).sum() / total)


def _pick_kmin(gamma: float, kmax: int, target: float) -> int:
    """Integer bisection: the kmin whose sampler mean is closest to target."""
    if _rounded_mean(gamma, 1, kmax) > target:
        return 1
    lo, hi = 1, kmax
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _rounded_mean(gamma, mid, kmax) <= target:
            lo = mid
        else:
            hi = mid - 1
    if lo < kmax:
        below = _rounded_mean(gamma, lo, kmax)
        above = _rounded_mean(gamma, lo + 1, kmax)
        if abs(above - target) < abs(below - target):
            return lo + 1
    return lo


# ---------------------------------------------------------------------------
# Community sizes
# ---------------------------------------------------------------------------


def sample_community_sizes(params: LfrParams, rng=None) -> list[int]:
    """Power-law community sizes in [cmin, cmax] summing exactly to n.

    Draws accumulate until they reach n; the tail is then adjusted to
    hit the sum exactly, shedding or adding units within the bounds
    (dropping the last community if it cannot be kept above cmin).

    Raises:
        Infeasible: if no multiset of sizes in [cmin, cmax] sums to n.
    """
    n, cmin, cmax = params.n, params.cmin, params.cmax
    min_count = math.ceil(n / cmax)
    if min_count * cmin > n:
        raise Infeasible(
            f"no community count c satisfies c*{cmin} <= {n} <= c*{cmax}"
        )
    if rng is None:
        rng = np.random.default_rng(params.seed)

    sizes: list[int] = []
    while sum(sizes) < n:
        draw = _sample_power_law_rng(rng, params.tau2, cmin, cmax, 1)
        sizes.append(int(draw[0]))

    # drop communities while even all-cmin would overshoot n
    while len(sizes) * cmin > n:
        sizes.pop()
    # now c*cmin <= n <= c*cmax is guaranteed by the feasibility check,
    # so walking +-1 adjustments from the last element always lands
    diff = n - sum(sizes)
    i = len(sizes) - 1
    stuck = 0
    while diff != 0:
        if diff > 0 and sizes[i] < cmax:
            sizes[i] += 1
            diff -= 1
            stuck = 0
        elif diff < 0 and sizes[i] > cmin:
            sizes[i] -= 1
            diff += 1
            stuck = 0
        else:
            stuck += 1
            if stuck > len(sizes):
                raise Infeasible("size adjustment stalled")  # pragma: no cover
        i = (i - 1) % len(sizes)
    return sizes


# ---------------------------------------------------------------------------
# Generation pipeline
# ---------------------------------------------------------------------------


def _degree_bounds(params: LfrParams) -> int:
    """Upper degree bound: heavy-tail allowance capped by assignability."""
    n, m, mu = params.n, params.m, params.mu
    kmax = min(n - 1, int(round(3 * m * math.ceil(math.log(n))))) if n > 1 else 0
    if mu < 1.0:
        # internal degree round((1-mu)k) must fit the smallest community
        assignable = math.ceil((params.cmin - 0.5) / (1.0 - mu)) - 1
        kmax = min(kmax, assignable)
    return kmax


def _degree_sequence(params: LfrParams, kmax: int, rng) -> tuple[np.ndarray, int]:
    n, m = params.n, params.m
    kmin = _pick_kmin(params.tau1, kmax, m)
    deg = _sample_power_law_rng(rng, params.tau1, kmin, kmax, n)

    target = m * n
    band = 0.02 * target
    total = int(deg.sum())
    while total > target + band:
        cands = np.flatnonzero(deg >= 2)
        if len(cands) == 0:
            raise _AttemptFailed("cannot reduce degree sequence mean")
        deg[cands[int(rng.integers(len(cands)))]] -= 1
        total -= 1
    while total < target - band:
        cands = np.flatnonzero(deg < kmax)
        if len(cands) == 0:
            raise _AttemptFailed("cannot raise degree sequence mean")
        deg[cands[int(rng.integers(len(cands)))]] += 1
        total += 1
    if total % 2:
        up = total < target
        cands = np.flatnonzero(deg < kmax) if up else np.flatnonzero(deg >= 2)
        if len(cands) == 0:
            up = not up
            cands = np.flatnonzero(deg < kmax) if up else np.flatnonzero(deg >= 2)
        if len(cands) == 0:
            raise _AttemptFailed("cannot even out degree sum")
        deg[cands[int(rng.integers(len(cands)))]] += 1 if up else -1
    return deg, kmin


def _assign_communities(
    sizes: list[int], internal: np.ndarray, rng
) -> tuple[np.ndarray, list[list[int]]]:
    """Random community assignment with eviction from full communities."""
    n = len(internal)
    c = len(sizes)
    comm_of = np.full(n, -1, dtype=np.int64)
    members: list[set] = [set() for _ in range(c)]
    order = np.arange(n)
    rng.shuffle(order)
    free = [int(v) for v in order]
    budget = 500 * n
    while free:
        budget -= 1
        if budget < 0:
            raise _AttemptFailed("community assignment did not settle")
        v = free.pop()
        ci = int(rng.integers(c))
        if internal[v] >= sizes[ci]:
            free.append(v)
            continue
        members[ci].add(v)
        comm_of[v] = ci
        if len(members[ci]) > sizes[ci]:
            pool = sorted(members[ci])
            u = pool[int(rng.integers(len(pool)))]
            members[ci].remove(u)
            comm_of[u] = -1
            free.append(u)
    return comm_of, [sorted(s) for s in members]


def _match_stubs(ids: np.ndarray, counts: np.ndarray, rng) -> list[tuple[int, int]]:
    stubs = np.repeat(ids, counts)
    rng.shuffle(stubs)
    return [(int(stubs[i]), int(stubs[i + 1])) for i in range(0, len(stubs), 2)]


def _repair_edges(edges, comm_of, rng) -> None:
    """Swap away self-loops, duplicates and intra-community externals.

    edges is a list of [u, v, cls] records, cls being the community id
    for internal edges or -1 for external ones; swaps stay within one
    class so degrees and internal/external stub counts are preserved.
    Mutates edges in place; raises _AttemptFailed if the swap budget
    runs out with problems remaining.
    """
    if not edges:
        return

    def key(u, v):
        return (u, v) if u <= v else (v, u)

    counts: dict[tuple[int, int], int] = {}
    for u, v, _ in edges:
        counts[key(u, v)] = counts.get(key(u, v), 0) + 1

    pools: dict[int, list[int]] = {}
    for idx, (_, _, cls) in enumerate(edges):
        pools.setdefault(cls, []).append(idx)

    def is_bad(idx) -> bool:
        u, v, cls = edges[idx]
        if u == v or counts[key(u, v)] > 1:
            return True
        return cls == -1 and comm_of[u] == comm_of[v]

    budget = 100 * len(edges)
    while budget > 0:
        bads = [idx for idx in range(len(edges)) if is_bad(idx)]
        if not bads:
            return
        for idx in bads:
            if budget <= 0:
                break
            budget -= 1
            if not is_bad(idx):  # fixed by an earlier swap this pass
                continue
            u, v, cls = edges[idx]
            pool = pools[cls]
            other = pool[int(rng.integers(len(pool)))]
            if other == idx:
                continue
            p, q, _ = edges[other]
            if int(rng.integers(2)):
                p, q = q, p
            # propose (u,p) and (v,q)
            if u == p or v == q:
                continue
            if cls == -1 and (comm_of[u] == comm_of[p] or comm_of[v] == comm_of[q]):
                continue
            old1, old2 = key(u, v), key(p, q)
            new1, new2 = key(u, p), key(v, q)
            if new1 == new2:
                continue
            counts[old1] -= 1
            counts[old2] -= 1
            if counts.get(new1, 0) or counts.get(new2, 0):
                counts[old1] += 1
                counts[old2] += 1
                continue
            counts[new1] = counts.get(new1, 0) + 1
            counts[new2] = counts.get(new2, 0) + 1
            for zero in {old1, old2}:
                if counts.get(zero) == 0:
                    del counts[zero]
            edges[idx] = [u, p, cls]
            edges[other] = [v, q, edges[other][2]]
    raise _AttemptFailed("edge repair budget exhausted")


def _attempt(params: LfrParams, rng, attempt_index: int) -> LfrOutput:
    n, mu = params.n, params.mu
    kmax = _degree_bounds(params)
    if kmax < 1:
        raise _AttemptFailed(
            "no feasible degree: internal degrees cannot fit any community"
        )
    deg, kmin = _degree_sequence(params, kmax, rng)
    sizes = sample_community_sizes(params, rng)

    internal = np.floor((1.0 - mu) * deg + 0.5).astype(np.int64)
    comm_of, members = _assign_communities(sizes, internal, rng)

    # per-community parity: internal stubs must pair up inside
    for mem in members:
        if int(internal[mem].sum()) % 2 == 0:
            continue
        cands = [v for v in mem if internal[v] >= 2]
        if not cands:
            cands = [v for v in mem if internal[v] >= 1]
        v = cands[int(rng.integers(len(cands)))]
        internal[v] -= 1
        if mu == 0.0:
            deg[v] -= 1  # keep the graph all-internal: drop the stub outright

    external = deg - internal
    if int(external.sum()) % 2:
        # unreachable: total degree and internal sums are both even
        raise _AttemptFailed("external stub parity broke")

    edges: list[list[int]] = []
    for ci, mem in enumerate(members):
        ids = np.array(mem, dtype=np.int64)
        for u, v in _match_stubs(ids, internal[ids], rng):
            edges.append([u, v, ci])
    for u, v in _match_stubs(np.arange(n), external, rng):
        edges.append([u, v, -1])

    _repair_edges(edges, comm_of, rng)

    pairs = [(u, v) for u, v, _ in edges]
    if len({(min(u, v), max(u, v)) for u, v in pairs}) != len(pairs):
        raise _AttemptFailed("duplicate edges survived repair")  # pragma: no cover
    graph = Graph.from_edge_list(n, pairs)
    truth = Partition.from_labels(comm_of)

    edge_count = graph.m
    inter = sum(1 for u, v in graph.edges if comm_of[u] != comm_of[v])
    report = GenerationReport(
        avg_degree=2.0 * edge_count / n,
        mu=inter / edge_count if edge_count else 0.0,
        community_sizes=tuple(truth.sizes()),
        retries=attempt_index,
        kmin=kmin,
        kmax=kmax,
        edge_count=edge_count,
    )
    return LfrOutput(graph=graph, ground_truth=truth, realized=report)


def generate_lfr(params: LfrParams) -> LfrOutput:
    """Generate one benchmark graph; deterministic for (params, seed).

    Each attempt draws from an independent stream seeded by
    (params.seed, attempt index); recoverable construction failures
    (stub parity dead ends, unrepairable multi-edges, ...) trigger a
    retry with the next stream.

    Raises:
        GenerationFailed: after max_retries failed attempts.
        Infeasible: if community sizes cannot sum to n at all.
        BadRange: for out-of-domain parameters.
    """
    params.check()
    last = None
    for attempt in range(params.max_retries):
        rng = np.random.default_rng([params.seed, attempt])
        try:
            return _attempt(params, rng, attempt)
        except _AttemptFailed as exc:
            last = exc
    raise GenerationFailed(
        f"gave up after {params.max_retries} attempts (last problem: {last})"
    )


def validate_lfr(
    out: LfrOutput, params: LfrParams, tol_mu: float = 0.05, tol_deg: float = 0.10
) -> ValidationReport:
    """Measure the output against the requested parameters (report-only)."""
    g = out.graph
    pairs = g.edges
    simple_ok = all(u != v for u, v in pairs) and len(set(pairs)) == len(pairs)
    sizes = tuple(out.ground_truth.sizes())
    sizes_ok = all(params.cmin <= s <= params.cmax for s in sizes)
    labels = out.ground_truth.labels
    inter = sum(1 for u, v in pairs if labels[u] != labels[v])
    measured_mu = inter / g.m if g.m else 0.0
    avg = 2.0 * g.m / g.n if g.n else 0.0
    deg = degrees(g)
    return ValidationReport(
        simple_ok=simple_ok,
        sizes_ok=sizes_ok,
        mu_ok=abs(measured_mu - params.mu) <= tol_mu,
        degree_ok=abs(avg - params.m) <= tol_deg * params.m,
        isolated_count=int((deg == 0).sum()),
        measured_mu=measured_mu,
        measured_avg_degree=avg,
        community_sizes=sizes,
    )


def write_lfr_output(out: LfrOutput, params: LfrParams, prefix: str) -> dict:
    """Write <prefix>.edges, <prefix>.truth and <prefix>.json; returns
    the path map."""
    paths = {
        "edges": f"{prefix}.edges",
        "truth": f"{prefix}.truth",
        "meta": f"{prefix}.json",
    }
    write_edge_list(out.graph, paths["edges"])
    write_partition(out.ground_truth, paths["truth"])
    meta = {
        "params": asdict(params),
        "seed": params.seed,
        "realized": out.realized.to_dict(),
    }
    with open(paths["meta"], "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
