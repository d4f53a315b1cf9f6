import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopnav.hopspanner import build
from hopnav.pathquery import annotate, batch_find_paths, check_all_pairs, find_path, product_query
from hopnav.treemetric import WeightedTree, all_pairs_distances, path_tree

import oracles
from conftest import make_tree


def test_p5_paths(p5):
    _, D = build(p5, k=2)
    p = find_path(D, 0, 4)
    assert p.vertices == (0, 2, 4) and p.weight == 7 and p.hops == 2
    p = find_path(D, 1, 3)
    assert p.vertices == (1, 2, 3) and p.weight == 3
    p = find_path(D, 3, 3)
    assert p.vertices == (3,) and p.weight == 0
    with pytest.raises(KeyError):
        find_path(D, 0, 9)


def test_steiner_vertex_is_not_an_endpoint():
    t = path_tree([1, 1], required=[0, 2])
    _, D = build(t, k=2)
    assert find_path(D, 0, 2).weight == 2
    with pytest.raises(KeyError):
        find_path(D, 0, 1)


@given(st.integers(1, 60), st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_paths_against_bfs_oracle(n, seed, k):
    rng = np.random.default_rng(seed)
    t, edges = make_tree(n, rng)
    sp, D = build(t, k=k)
    adj = oracles.adjacency(n, edges)
    dist = oracles.distances(adj)
    for _ in range(40):
        u, v = (int(x) for x in rng.integers(0, n, 2))
        p = find_path(D, u, v)
        assert p.hops <= k
        assert p.weight == dist[u, v]
        assert all(sp.has_edge(a, b) for a, b in p.edges())
        assert oracles.is_subsequence(list(p.vertices), oracles.tree_path(adj, u, v))
        assert p.calls <= max(1, k // 2)


@given(st.integers(2, 60), st.integers(0, 2**32 - 1), st.integers(2, 8), st.floats(0.1, 1))
def test_all_pairs_kernel_with_steiner(n, seed, k, frac):
    rng = np.random.default_rng(seed)
    t, _ = make_tree(n, rng)
    R = np.unique(rng.choice(n, max(1, int(frac * n))))
    sp, D = build(t, R=R, k=k)
    dist = all_pairs_distances(t).astype(np.float64)
    stats = check_all_pairs(D.kernel_arrays, k, R.astype(np.int64), dist, sp.keys,
                            sp.weights.astype(np.float64), n, D.max_base)
    assert stats[1:6].tolist() == [0, 0, 0, 0, 0]
    assert stats[6] <= k


def test_batch_matches_single():
    rng = np.random.default_rng(2)
    t, _ = make_tree(50, rng)
    _, D = build(t, k=5)
    us = rng.integers(0, 50, 100)
    vs = rng.integers(0, 50, 100)
    paths, lens, calls = batch_find_paths(D.kernel_arrays, us, vs, 5, D.max_base)
    for i in range(100):
        want = find_path(D, int(us[i]), int(vs[i]))
        assert tuple(paths[i, :lens[i]].tolist()) == want.vertices
        assert calls[i] == want.calls


def test_string_annotation():
    t = path_tree([1, 1])
    _, D = build(t, 1, None, 2)  # rooted at the middle: the base case adds (0, 2)
    ann = annotate(D, {(0, 1): "a", (1, 2): "b"}, lambda x, y: x + y, "")
    assert ann.values[(0, 2)] == ("ab", "ba")
    c = [0]
    assert product_query(D, ann, 0, 2, c) == "ab" and c[0] == 0
    assert product_query(D, ann, 2, 0) == "ba"
    assert product_query(D, ann, 1, 1) == ""
    mx = annotate(D, {(0, 1): 2, (1, 2): 5}, max)
    assert mx.values[(0, 2)] == (5, 5)
    with pytest.raises(ValueError):
        product_query(D, mx, 1, 1)
    with pytest.raises(ValueError):
        annotate(D, {(0, 1): 2}, max)


def test_identity_labels():
    rng = np.random.default_rng(5)
    t, _ = make_tree(40, rng)
    _, D = build(t, k=4)
    ann = annotate(D, lambda c, p: 0, lambda x, y: x + y, 0)
    assert all(v == (0, 0) for v in ann.values.values())


def test_p5_product_counter(p5):
    _, D = build(p5, k=2)
    ann = annotate(D, p5.weight.tolist(), lambda x, y: x + y, 0)
    c = [0]
    assert product_query(D, ann, 0, 4, c) == 7 and c[0] == 1


@given(st.integers(2, 50), st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_noncommutative_products(n, seed, k):
    rng = np.random.default_rng(seed)
    t, edges = make_tree(n, rng)
    label = {v: tuple(int(x) for x in rng.integers(0, 97, 4)) for v in range(n)}
    _, D = build(t, k=k)
    ann = annotate(D, lambda c, p: label[c], oracles.matmul_mod)
    adj = oracles.adjacency(n, edges)
    for _ in range(30):
        u, v = (int(x) for x in rng.integers(0, n, 2))
        if u == v:
            continue
        path = oracles.tree_path(adj, u, v)
        want = None
        for a, b in zip(path, path[1:]):
            child = a if t.parent[a] == b else b
            want = label[child] if want is None else oracles.matmul_mod(want, label[child])
        c = [0]
        assert product_query(D, ann, u, v, c) == want
        assert c[0] <= k - 1
