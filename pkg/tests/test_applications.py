import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopnav.applications import (
    INF,
    VerifierState,
    approximate_mst,
    approximate_spt,
    eval_lower_bound,
    greedy_spanner,
    prim_mst,
    sparsify,
    spt_ancestor_violations,
    spt_is_tree,
    stretch,
    tree_product,
    verify_mst_edge,
)
from hopnav.pathquery import annotate
from hopnav.treecover import FiniteMetric, build_navigator, single_tree_cover, star_cover
from hopnav.treemetric import WeightedTree, all_pairs_distances, path_tree

import oracles
from conftest import make_tree
from test_treecover import random_metric


def test_top_value():
    assert INF > 10**30 and not INF < 5 and INF == INF
    assert sorted([3, INF, 1], key=lambda x: (x is INF, x if x is not INF else 0))[-1] is INF


def _instrumented(nav, rt):
    seen = []

    def hook(res):
        seen.append((spt_is_tree(res), spt_ancestor_violations(res)))

    res = approximate_spt(nav, rt, hook)
    return res, seen


@pytest.mark.parametrize("k", [2, 3, 5])
def test_spt_tree_metric(k):
    rng = np.random.default_rng(k)
    t, _ = make_tree(45, rng)
    M = FiniteMetric(all_pairs_distances(t), validate=False)
    nav = build_navigator(M, single_tree_cover(t), k)
    for rt in (0, 7, 44):
        res, seen = _instrumented(nav, rt)
        assert all(ok and bad == 0 for ok, bad in seen)
        assert all(res.dist[v] == M.dist[rt, v] for v in range(45))


def test_spt_star_and_trivial():
    M = random_metric(30, np.random.default_rng(2))
    nav = build_navigator(M, star_cover(M), 2)
    res, seen = _instrumented(nav, 4)
    assert all(ok and bad == 0 for ok, bad in seen)
    assert [res.dist[v] for v in range(30)] == M.dist[4].tolist()
    one = FiniteMetric(np.zeros((1, 1), dtype=np.int64))
    res = approximate_spt(build_navigator(one, star_cover(one), 2), 0)
    assert res.dist == {0: 0} and res.parent == {0: None}
    with pytest.raises(KeyError):
        approximate_spt(nav, 99)


def test_prim_matches_kruskal():
    rng = np.random.default_rng(6)
    for n in (1, 2, 5, 40):
        M = random_metric(n, rng)
        edges, w = prim_mst(M)
        assert oracles.is_spanning_tree(n, edges) or n == 1
        assert w == oracles.mst_weight(M.dist)


@given(st.integers(2, 40), st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_mst_equals_exact(n, seed, k):
    rng = np.random.default_rng(seed)
    M = random_metric(n, rng)
    nav = build_navigator(M, star_cover(M), k)
    edges, total = approximate_mst(M, nav)
    assert oracles.is_spanning_tree(n, [(a, b) for a, b, _ in edges])
    assert total == prim_mst(M)[1]
    union = nav.union_edges()
    assert all((min(a, b), max(a, b)) in union for a, b, _ in edges)


def test_mst_tree_metric():
    rng = np.random.default_rng(3)
    t, _ = make_tree(50, rng)
    M = FiniteMetric(all_pairs_distances(t), validate=False)
    nav = build_navigator(M, single_tree_cover(t), 3)
    _, total = approximate_mst(M, nav)
    assert total == int(t.weight.sum())


def test_sparsify_greedy_and_complete():
    M = random_metric(30, np.random.default_rng(7))
    nav = build_navigator(M, star_cover(M), 2)
    G = greedy_spanner(M, 3)
    Gp = sparsify(list(G), nav)
    assert stretch(M, Gp) <= 3 + 1e-12
    assert sum(Gp.values()) <= sum(G.values())
    assert len(Gp) <= len(nav.union_edges())
    dist = oracles.dijkstra_all(30, Gp)
    assert np.all(dist >= M.dist)
    # complete graph on a tree metric with a single-tree cover: stretch 1
    t, _ = make_tree(30, np.random.default_rng(1))
    Mt = FiniteMetric(all_pairs_distances(t), validate=False)
    navt = build_navigator(Mt, single_tree_cover(t), 2)
    Gt = sparsify([(a, b) for a in range(30) for b in range(a + 1, 30)], navt)
    assert stretch(Mt, Gt) == 1.0
    assert sparsify([(0, 1)], navt) == {k: v for k, v in sparsify([(1, 0)], navt).items()}


def test_lower_bounds():
    assert eval_lower_bound(1024, 2) == 1280
    assert eval_lower_bound(100, 3) == 99
    assert math.floor(eval_lower_bound(2**20, 3)) == 88
    with pytest.raises(ValueError):
        eval_lower_bound(10, 4)


def test_verifier_examples():
    t = path_tree([2, 5])
    for k in (2, 3):
        V = VerifierState(t, k)
        ok, c = verify_mst_edge(V, 0, 2, 4)
        assert not ok and c <= k
        assert verify_mst_edge(V, 0, 2, 6)[0]
    V = VerifierState(t, 2)
    assert verify_mst_edge(V, 0, 2, 4, optimized=True) == (False, 1)
    assert verify_mst_edge(V, 0, 2, 4) == (False, 2)
    # rooted in the middle the base case adds (0, 2): one edge, one comparison
    V = VerifierState(t.rerooted(1), 2)
    assert verify_mst_edge(V, 0, 2, 4) == (False, 1)
    with pytest.raises(ValueError):
        verify_mst_edge(V, 0, 1, 4)


@given(st.integers(3, 60), st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_verifier_against_bruteforce(n, seed, k):
    rng = np.random.default_rng(seed)
    t, edges = make_tree(n, rng, wmax=50)
    adj = oracles.adjacency(n, edges)
    V = VerifierState(t, k)
    for _ in range(25):
        u, v = (int(x) for x in rng.integers(0, n, 2))
        if u == v or v in adj[u]:
            continue
        path = oracles.tree_path(adj, u, v)
        mx = max(adj[a][b] for a, b in zip(path, path[1:]))
        w = int(rng.integers(1, 52))
        ok, c = verify_mst_edge(V, u, v, w)
        assert ok == (w > mx) and c <= k
        ok2, c2 = verify_mst_edge(V, u, v, w, optimized=True)
        assert ok2 == ok
        if k % 2 == 0:
            assert c2 <= k - 1
        assert V.path_max(u, v) == mx


def test_rank_permutations():
    rng = np.random.default_rng(1)
    t, _ = make_tree(80, rng)
    V = VerifierState(t, 4)
    for ranks in V.rank.values():
        assert sorted(ranks.values()) == list(range(1, len(ranks) + 1))


def test_tree_product_delegates(p5):
    from hopnav.hopspanner import build
    _, D = build(p5, k=2)
    ann = annotate(D, p5.weight.tolist(), lambda a, b: a + b)
    assert tree_product(D, ann, 0, 4) == 7
