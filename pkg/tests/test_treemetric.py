import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopnav.treemetric import (
    TreeFormatError,
    WeightedTree,
    all_pairs_distances,
    decompose,
    format_tree,
    parse_tree,
    path_tree,
    prune,
    read_tree,
    tree_distance,
    write_tree,
)

import oracles
from conftest import make_tree


def test_tree_distance_examples():
    t = path_tree([1, 2])
    assert tree_distance(t, 0, 2) == (3, tree_distance(t, 0, 2)[1])
    assert tree_distance(t, 0, 2)[1].vertices == (0, 1, 2)
    d, p = tree_distance(t, 1, 1)
    assert d == 0 and p.vertices == (1,)
    star = WeightedTree.from_edges(3, [(0, 1, 2), (0, 2, 5)])
    d, p = tree_distance(star, 1, 2)
    assert d == 7 and p.vertices == (1, 0, 2)
    with pytest.raises(KeyError):
        tree_distance(t, 0, 3)


@given(st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_distance_matches_bfs(n, seed):
    rng = np.random.default_rng(seed)
    t, edges = make_tree(n, rng)
    adj = oracles.adjacency(n, edges)
    want = oracles.distances(adj)
    assert np.array_equal(all_pairs_distances(t), want)
    u, v = rng.integers(0, n, 2)
    d, p = tree_distance(t, int(u), int(v))
    assert d == want[u, v]
    assert list(p.vertices) == oracles.tree_path(adj, int(u), int(v))


def test_prune_examples():
    t = path_tree([1, 2])
    pt, r = prune(t, 0, {0, 2})
    assert pt.n == 2 and r == 0
    assert sorted(pt.ids.tolist()) == [0, 2]
    assert pt.weight.tolist() == [0, 3]
    # spider with three legs of length 2; the center is the only Steiner vertex kept
    edges = [(0, 1, 1), (1, 2, 1), (0, 3, 1), (3, 4, 1), (0, 5, 1), (5, 6, 1)]
    sp = WeightedTree.from_edges(7, edges)
    pt, _ = prune(sp, 0, {2, 4, 6})
    assert sorted(pt.ids.tolist()) == [0, 2, 4, 6]
    assert pt.weight[1:].tolist() == [2, 2, 2]
    assert not pt.required[pt.ids.tolist().index(0)]
    # R = V leaves the tree alone
    t5, _ = make_tree(12, np.random.default_rng(0))
    pt, _ = prune(t5, 0, range(12))
    assert pt.n == 12
    with pytest.raises(ValueError):
        prune(t, 0, [])


@given(st.integers(1, 80), st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_prune_properties(n, seed, frac):
    rng = np.random.default_rng(seed)
    t, edges = make_tree(n, rng)
    R = sorted({int(x) for x in rng.choice(n, max(1, int(frac * n)), replace=True)})
    rt = int(rng.integers(0, n))
    pt, r = prune(t, rt, R)
    ids = pt.ids.tolist()
    assert set(R) <= set(ids)
    assert pt.n - len(R) <= len(R) - 1
    full = all_pairs_distances(t)
    sub = all_pairs_distances(pt)
    for i, a in enumerate(ids):
        for j, b in enumerate(ids):
            assert sub[i, j] == full[a, b]
    # each pruned edge is a tree distance
    for c, p, w in pt.edges():
        assert w == full[ids[c], ids[p]]


def test_decompose_examples():
    assert decompose(path_tree([1] * 4), 0, None, 3) == {2}
    cv = decompose(path_tree([1] * 8), 0, None, 3)
    assert len(cv) <= 2
    assert cv == {1, 5}  # frozen from the post-order oracle, 0-indexed
    assert decompose(path_tree([1] * 4), 0, None, 5) == set()
    with pytest.raises(ValueError):
        decompose(path_tree([1]), 0, None, 0)


@given(st.integers(1, 70), st.integers(0, 2**32 - 1), st.data())
def test_decompose_properties(n, seed, data):
    rng = np.random.default_rng(seed)
    t, edges = make_tree(n, rng)
    R = sorted({int(x) for x in rng.choice(n, int(rng.integers(1, n + 1)))})
    ell = data.draw(st.integers(1, len(R)))
    cv = decompose(t, int(rng.integers(0, n)), R, ell)
    adj = oracles.adjacency(n, edges)
    for comp in oracles.components_without(adj, cv):
        assert len(set(comp) & set(R)) <= ell
    assert len(cv) <= n // (ell + 1)
    if 2 * ell >= len(R) > ell:
        assert len(cv) == 1


def test_centroid_halves():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = int(rng.integers(2, 60))
        t, edges = make_tree(n, rng)
        ell = (n + 1) // 2
        cv = decompose(t, 0, None, ell)
        assert len(cv) == 1
        for comp in oracles.components_without(oracles.adjacency(n, edges), cv):
            assert len(comp) <= n // 2


def test_parse_and_format_roundtrip(tmp_path):
    text = "5 1\n1 2 1\n2 3 2\n3 4 1\n4 5 3\n"
    t = parse_tree(text)
    assert t.n == 5 and t.ids.tolist() == [1, 2, 3, 4, 5]
    assert tree_distance(t, 0, 4)[0] == 7
    write_tree(t, tmp_path / "t.txt")
    t2 = read_tree(tmp_path / "t.txt")
    assert np.array_equal(all_pairs_distances(t), all_pairs_distances(t2))
    t3 = parse_tree("3 10\n10 20 1.5\n20 30 2\nR: 10 30\n")
    assert t3.required.tolist() == [True, False, True]
    assert "R: 10 30" in format_tree(t3)


@pytest.mark.parametrize("text", [
    "", "3\n1 2 1\n2 3 1\n", "3 1\n1 2 1\n", "3 1\n1 2 1\n1 2 1\n",
    "3 1\n1 2 1\n2 3 -1\n", "3 1\n1 2 x\n2 3 1\n", "3 1\n1 2 1\n2 3 1\nR: 9\n",
    "4 1\n1 2 1\n2 3 1\n3 1 1\n",
])
def test_parse_rejects(text):
    with pytest.raises(TreeFormatError):
        parse_tree(text)


def test_from_parent_rejects_cycles():
    with pytest.raises(TreeFormatError):
        WeightedTree.from_parent([-1, 2, 1], [0, 1, 1])
