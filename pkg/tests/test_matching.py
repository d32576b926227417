from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsmatch.costs import CostTable
from hsmatch.errors import InfeasibleMatching
from hsmatch.histogram import PEHistogram
from hsmatch.matching import (WeightedBigraph, build_bigraph, max_cardinality, min_weight_assignment,
                              saturates_left, solve_mwmm)

from oracles import SAMPLE_COUNTS, SAMPLE_LEVELS, brute_min_injection, random_banded


def graph_from(v1, v2, T, W):
    return build_bigraph(v1, v2, T, lambda a, b: int(W[v1.index(a), v2.index(b)]))


def assert_valid(g, mt):
    lefts = [i for i, _ in mt.pairs]
    rights = [j for _, j in mt.pairs]
    assert sorted(lefts) == list(range(len(g.v1)))
    assert len(set(rights)) == len(rights)
    assert all((i, j) in g.edges for i, j in mt.pairs)
    assert mt.total_weight == sum(g.edges[p] for p in mt.pairs)


def sample_graph():
    hist = PEHistogram.from_counts(SAMPLE_COUNTS, SAMPLE_LEVELS)
    costs = CostTable.from_histogram(hist, 2)
    v1 = [-3, -2, -1, 2, 3, 4]
    v2 = [-5, -4, -3, -1, 2, 4, 5]
    return build_bigraph(v1, v2, 2, lambda y, q: costs.shift_cost(y, q - y)), costs


def test_sample_graph_edges():
    g, costs = sample_graph()
    i, j = g.v1.index(-3), g.v2.index(-5)
    assert g.edges[i, j] == costs.shift_cost(-3, -2)
    for (a, b) in g.edges:
        assert abs(g.v1[a] - g.v2[b]) <= 2
    assert saturates_left(g)


def test_banded_is_a_matching_of_sample_graph():
    g, _ = sample_graph()
    f = {-3: -4, -2: -1, -1: -3, 2: 4, 3: 2, 4: 5}
    pairs = [(g.v1.index(a), g.v2.index(b)) for a, b in f.items()]
    assert all(p in g.edges for p in pairs)
    assert len({b for _, b in pairs}) == len(pairs)


def test_band_excludes_all():
    g = build_bigraph([0], [5], 1, lambda a, b: 0)
    assert g.edges == {}
    assert not saturates_left(g)
    with pytest.raises(InfeasibleMatching):
        solve_mwmm(g)


def test_edge_count_matches_pair_scan(rng):
    for _ in range(50):
        v1, v2, _, W = random_banded(rng, T=3)
        g = graph_from(v1, v2, 3, W)
        assert len(g.edges) == sum(1 for a in v1 for b in v2 if abs(a - b) <= 3)


def test_single_edge():
    mt = solve_mwmm(WeightedBigraph((0,), (0,), 1, {(0, 0): 7}))
    assert mt.pairs == ((0, 0),) and mt.total_weight == 7


def test_two_by_two():
    g = WeightedBigraph((0, 1), (0, 1), 1, {(0, 0): 1, (0, 1): 2, (1, 0): 3, (1, 1): 1})
    mt = solve_mwmm(g)
    assert mt.pairs == ((0, 0), (1, 1)) and mt.total_weight == 2


def test_pigeonhole():
    g = WeightedBigraph((0, 1), (0, 5), 1, {(0, 0): 1, (1, 0): 1})
    assert not saturates_left(g)
    with pytest.raises(InfeasibleMatching):
        solve_mwmm(g)


def test_more_left_than_right():
    with pytest.raises(InfeasibleMatching):
        min_weight_assignment(np.zeros((3, 2), np.int64), np.ones((3, 2), bool))


def test_empty_left():
    cols, total = min_weight_assignment(np.zeros((0, 4), np.int64), np.zeros((0, 4), bool))
    assert len(cols) == 0 and total == 0


def test_random_against_brute_force(rng):
    for _ in range(300):
        v1, v2, T, W = random_banded(rng, max_left=6, max_right=8, span=6)
        g = graph_from(v1, v2, T, W)
        want = brute_min_injection(len(v1), len(v2), lambda i, j: g.edges.get((i, j)))
        assert saturates_left(g) == (want is not None)
        if want is None:
            with pytest.raises(InfeasibleMatching):
                solve_mwmm(g)
            continue
        mt = solve_mwmm(g, canonical=True)
        assert_valid(g, mt)
        assert mt.total_weight == want[0]
        # the fixed tie-break returns the smallest column sequence among optima
        assert tuple(j for _, j in mt.pairs) == want[1]
        fast = solve_mwmm(g, canonical=False)
        assert_valid(g, fast)
        assert fast.total_weight == want[0]


def test_fractional_weights():
    g = WeightedBigraph((0, 1), (0, 1, 2), 2, {(0, 0): Fraction(1, 2), (0, 1): 1, (1, 0): Fraction(3, 2),
                                               (1, 2): Fraction(5, 2)})
    mt = solve_mwmm(g)
    assert mt.total_weight == Fraction(5, 2) and mt.pairs == ((0, 1), (1, 0))


def test_huge_weights_stay_exact():
    big = 10 ** 30
    g = WeightedBigraph((0, 1), (0, 1), 1, {(0, 0): big, (0, 1): big + 1, (1, 0): big + 1, (1, 1): big + 3})
    mt = solve_mwmm(g)
    assert mt.total_weight == 2 * big + 2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 50))
def test_constant_shift_invariance(seed, c):
    rng = np.random.default_rng(seed)
    v1, v2, T, W = random_banded(rng, max_left=5, max_right=7, span=5)
    g = graph_from(v1, v2, T, W)
    if not saturates_left(g):
        return
    shifted = WeightedBigraph(g.v1, g.v2, T, {k: w + c for k, w in g.edges.items()})
    a, b = solve_mwmm(g), solve_mwmm(shifted)
    assert b.total_weight == a.total_weight + c * len(v1)
    assert a.pairs == b.pairs


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_deterministic(seed):
    rng = np.random.default_rng(seed)
    v1, v2, T, W = random_banded(rng)
    g = graph_from(v1, v2, T, W)
    if saturates_left(g):
        assert solve_mwmm(g) == solve_mwmm(g)


def test_max_cardinality_against_brute(rng):
    import itertools
    for _ in range(100):
        n1, n2 = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        adj = [[j for j in range(n2) if rng.random() < 0.35] for _ in range(n1)]
        best = 0
        for k in range(min(n1, n2), 0, -1):
            for rows in itertools.combinations(range(n1), k):
                if any(all(c in adj[r] for r, c in zip(rows, cols))
                       for cols in itertools.permutations(range(n2), k)):
                    best = k
                    break
            if best:
                break
        assert max_cardinality(adj, n2) == best
