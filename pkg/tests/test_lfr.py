import json
import math

import numpy as np
import pytest

from graphprox import (
    BadRange,
    GenerationFailed,
    Infeasible,
    LfrParams,
    degrees,
    generate_lfr,
    read_edge_list,
    read_partition,
    sample_community_sizes,
    sample_power_law,
    validate_lfr,
    write_lfr_output,
)

BASIC = LfrParams()  # n=300, m=5, tau1=2.5, tau2=1.5, sizes 80..140, mu=0.2


# ---------------------------------------------------------------------------
# Power-law sampling
# ---------------------------------------------------------------------------


def _analytic_rounded_mean(gamma, xmin, xmax):
    """Mean of round(x) for x ~ x^-gamma on [xmin-0.5, xmax+0.5].

    Written from the antiderivative directly, independent of the
    sampler's internals.
    """

    def mass(lo, hi):
        if gamma == 1.0:
            return math.log(hi / lo)
        e = 1.0 - gamma
        return (hi**e - lo**e) / e

    total = mass(xmin - 0.5, xmax + 0.5)
    acc = 0.0
    for k in range(xmin, xmax + 1):
        acc += k * mass(k - 0.5, k + 0.5)
    return acc / total


@pytest.mark.parametrize(
    "gamma,xmin,xmax",
    [(2.5, 1, 90), (2.0, 3, 50), (1.5, 80, 140), (1.0, 2, 40), (3.0, 1, 20)],
)
def test_power_law_mean_matches_analytic(gamma, xmin, xmax):
    count = 200_000
    draws = sample_power_law(gamma, xmin, xmax, count, seed=42)
    assert draws.min() >= xmin and draws.max() <= xmax
    expect = _analytic_rounded_mean(gamma, xmin, xmax)
    sigma = draws.std() / math.sqrt(count)
    assert abs(draws.mean() - expect) < 4 * sigma + 1e-9


def test_power_law_is_deterministic_and_integer():
    a = sample_power_law(2.5, 1, 50, 100, seed=7)
    b = sample_power_law(2.5, 1, 50, 100, seed=7)
    assert np.array_equal(a, b)
    assert a.dtype == np.int64
    assert not np.array_equal(a, sample_power_law(2.5, 1, 50, 100, seed=8))


def test_power_law_degenerate_support():
    draws = sample_power_law(2.5, 6, 6, 50, seed=0)
    assert np.all(draws == 6)


def test_power_law_heavier_tail_for_smaller_exponent():
    shallow = sample_power_law(1.5, 1, 100, 50_000, seed=1)
    steep = sample_power_law(3.0, 1, 100, 50_000, seed=1)
    assert shallow.mean() > steep.mean()


def test_power_law_domain_errors():
    with pytest.raises(BadRange):
        sample_power_law(2.5, 5, 4, 10, seed=0)
    with pytest.raises(BadRange):
        sample_power_law(2.5, 0, 4, 10, seed=0)
    with pytest.raises(BadRange):
        sample_power_law(0.5, 1, 4, 10, seed=0)
    with pytest.raises(BadRange):
        sample_power_law(2.5, 1, 4, -1, seed=0)


# ---------------------------------------------------------------------------
# Community sizes
# ---------------------------------------------------------------------------


def test_community_sizes_sum_and_bounds():
    for seed in range(10):
        sizes = sample_community_sizes(LfrParams(seed=seed))
        assert sum(sizes) == 300
        assert all(80 <= s <= 140 for s in sizes)


def test_community_sizes_deterministic():
    assert sample_community_sizes(BASIC) == sample_community_sizes(BASIC)


def test_community_sizes_infeasible():
    with pytest.raises(Infeasible):
        sample_community_sizes(LfrParams(n=100, cmin=60, cmax=70))


def test_community_sizes_tight_fit():
    # only one multiset works: two communities of exactly 50
    sizes = sample_community_sizes(LfrParams(n=100, cmin=50, cmax=50))
    assert sizes == [50, 50]


# ---------------------------------------------------------------------------
# Full generation
# ---------------------------------------------------------------------------


def test_generate_basic_configuration():
    out = generate_lfr(BASIC)
    g = out.graph
    assert g.n == 300
    assert out.ground_truth.n == 300
    assert out.ground_truth.k == len(out.realized.community_sizes)
    assert all(80 <= s <= 140 for s in out.realized.community_sizes)
    # the degree band is enforced during construction: within 2% + parity
    assert abs(out.realized.avg_degree - 5.0) <= 0.15
    assert abs(out.realized.mu - 0.2) <= 0.05
    assert out.realized.edge_count == g.m
    assert out.realized.kmin >= 1
    assert max(g.degree_sequence()) <= out.realized.kmax


def test_generate_is_deterministic():
    a = generate_lfr(BASIC)
    b = generate_lfr(BASIC)
    assert a.graph == b.graph
    assert a.ground_truth == b.ground_truth
    c = generate_lfr(LfrParams(seed=1))
    assert c.graph != a.graph


def test_generate_mu_zero_has_no_external_edges():
    out = generate_lfr(LfrParams(n=120, cmin=30, cmax=60, mu=0.0, seed=3))
    labels = out.ground_truth.labels
    assert all(labels[u] == labels[v] for u, v in out.graph.edges)
    assert out.realized.mu == 0.0


def test_generate_high_mu():
    out = generate_lfr(LfrParams(mu=0.6, seed=5))
    assert abs(out.realized.mu - 0.6) <= 0.08


def test_generate_never_produces_self_loops_or_duplicates():
    for seed in (0, 1, 2):
        g = generate_lfr(LfrParams(seed=seed)).graph
        assert all(u != v for u, v in g.edges)
        assert len(set(g.edges)) == g.m  # Graph already dedups; belt and braces


def test_generate_domain_errors():
    with pytest.raises(BadRange):
        generate_lfr(LfrParams(n=0))
    with pytest.raises(BadRange):
        generate_lfr(LfrParams(m=0.5))
    with pytest.raises(BadRange):
        generate_lfr(LfrParams(mu=1.5))
    with pytest.raises(BadRange):
        generate_lfr(LfrParams(cmin=200, cmax=100))
    with pytest.raises(BadRange):
        generate_lfr(LfrParams(max_retries=0))


def test_generate_warns_on_unusual_exponents():
    with pytest.warns(UserWarning):
        LfrParams(tau1=5.0).check()
    with pytest.warns(UserWarning):
        LfrParams(tau2=0.5).check()


def test_generate_gives_up_when_unassignable():
    # cmin=1 at mu=0 leaves no room for any internal degree, so every
    # attempt dies and the retry budget runs out
    params = LfrParams(n=20, m=2.0, cmin=1, cmax=20, mu=0.0, max_retries=2, seed=0)
    with pytest.raises(GenerationFailed):
        generate_lfr(params)


def test_retries_are_reported():
    out = generate_lfr(BASIC)
    assert out.realized.retries >= 0
    assert out.realized.retries < BASIC.max_retries


# ---------------------------------------------------------------------------
# Validation + file output
# ---------------------------------------------------------------------------


def test_validate_basic_output():
    out = generate_lfr(BASIC)
    report = validate_lfr(out, BASIC)
    assert report.passed
    assert report.simple_ok and report.sizes_ok and report.mu_ok and report.degree_ok
    assert report.isolated_count == 0
    assert report.measured_mu == pytest.approx(out.realized.mu)
    assert report.measured_avg_degree == pytest.approx(out.realized.avg_degree)


def test_validate_respects_tolerances():
    out = generate_lfr(BASIC)
    tight = validate_lfr(out, BASIC, tol_mu=1e-9, tol_deg=1e-9)
    assert not (tight.mu_ok and tight.degree_ok)


def test_write_lfr_output(tmp_path):
    out = generate_lfr(LfrParams(n=120, cmin=30, cmax=60, seed=2))
    params = LfrParams(n=120, cmin=30, cmax=60, seed=2)
    prefix = str(tmp_path / "bench")
    paths = write_lfr_output(out, params, prefix)

    g = read_edge_list(paths["edges"])
    assert g == out.graph
    truth = read_partition(paths["truth"])
    assert truth == out.ground_truth
    meta = json.loads(open(paths["meta"]).read())
    assert meta["params"]["n"] == 120
    assert meta["seed"] == 2
    assert meta["realized"]["edge_count"] == g.m
    assert tuple(meta["realized"]["community_sizes"]) == tuple(truth.sizes())


def test_no_isolated_nodes_in_practice():
    # degrees start at kmin >= 1 and repairs preserve them
    for seed in range(5):
        out = generate_lfr(LfrParams(seed=seed))
        assert int((degrees(out.graph) == 0).sum()) == 0
