import json
from collections import Counter

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from unicellular.plane_tree import (
    PlaneTree,
    count_paths,
    enumerate_plane_trees,
    from_dyck,
    sample_plane_tree,
    tree_degree_histogram,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429]


def path_tree(n):
    return PlaneTree(n, np.array([-1] + list(range(n))))


def star_tree(n):
    return PlaneTree(n, np.array([-1] + [0] * n))


def brute_paths(tree, ell):
    g = nx.Graph()
    g.add_nodes_from(range(tree.n + 1))
    g.add_edges_from((int(tree.parent[v]), v) for v in range(1, tree.n + 1))
    dist = dict(nx.all_pairs_shortest_path_length(g))
    return sum(1 for a in dist for b in dist[a] if dist[a][b] == ell)


def test_enumeration_counts_catalan():
    for n in range(1, 8):
        trees = enumerate_plane_trees(n)
        assert len(trees) == CATALAN[n]
        assert len({t.key() for t in trees}) == CATALAN[n]


def test_n1_unique():
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert sample_plane_tree(1, rng).key() == (-1, 0)


def test_zero_edges_rejected():
    with pytest.raises(ValueError):
        sample_plane_tree(0, np.random.default_rng(0))


def test_n2_frequencies():
    rng = np.random.default_rng(1)
    counts = Counter(sample_plane_tree(2, rng).key() for _ in range(10_000))
    assert set(counts) == {(-1, 0, 1), (-1, 0, 0)}
    for c in counts.values():
        assert abs(c / 10_000 - 0.5) <= 0.02


@pytest.mark.parametrize("n", [3, 4])
def test_uniform_over_enumeration(n):
    trees = enumerate_plane_trees(n)
    rng = np.random.default_rng(100 + n)
    draws = 100_000
    counts = Counter(sample_plane_tree(n, rng).key() for _ in range(draws))
    assert set(counts) == {t.key() for t in trees}
    obs = [counts[t.key()] for t in trees]
    for o in obs:
        if n == 3:
            assert abs(o / draws - 0.2) <= 0.02
    assert stats.chisquare(obs).pvalue > 1e-3


def test_reproducible():
    a = sample_plane_tree(500, np.random.default_rng(42))
    b = sample_plane_tree(500, np.random.default_rng(42))
    assert a == b


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2**32 - 1))
def test_tree_invariants(n, seed):
    t = sample_plane_tree(n, np.random.default_rng(seed))
    assert t.parent.shape == (n + 1,)
    assert t.parent[0] == -1
    assert np.all(t.parent[1:] < np.arange(1, n + 1))
    kids = t.children
    assert sum(len(k) for k in kids) == n
    for p, ks in enumerate(kids):
        assert ks == sorted(ks)
        assert all(t.parent[c] == p for c in ks)
    hist = tree_degree_histogram(t)
    assert sum(hist.values()) == n + 1
    assert sum(k * c for k, c in hist.items()) == 2 * n
    assert count_paths(t, 1) == 2 * n


def test_count_paths_examples():
    assert count_paths(path_tree(3), 1) == 6
    assert count_paths(star_tree(4), 2) == 12
    assert count_paths(star_tree(4), 3) == 0
    assert count_paths(path_tree(3), 4) == 0
    with pytest.raises(ValueError):
        count_paths(path_tree(3), 0)


@pytest.mark.parametrize("seed", range(8))
def test_count_paths_vs_all_pairs(seed):
    rng = np.random.default_rng(seed)
    t = sample_plane_tree(int(rng.integers(1, 60)), rng)
    for ell in range(1, 8):
        assert count_paths(t, ell) == brute_paths(t, ell)


def test_count_paths_every_small_tree():
    for n in range(1, 6):
        for t in enumerate_plane_trees(n):
            for ell in range(1, n + 2):
                assert count_paths(t, ell) == brute_paths(t, ell)


def test_degree_histogram_examples():
    assert tree_degree_histogram(star_tree(4)) == {1: 4, 4: 1}
    assert tree_degree_histogram(path_tree(2)) == {1: 2, 2: 1}


def test_degree_law_large_tree():
    t = sample_plane_tree(100_000, np.random.default_rng(5))
    hist = tree_degree_histogram(t)
    for k in range(1, 7):
        assert abs(hist.get(k, 0) / (t.n + 1) - 2.0**-k) <= 0.01


def test_dyck_decoding():
    t = from_dyck([1, 1, -1, 1, -1, -1, 1, -1])
    assert t.parent.tolist() == [-1, 0, 1, 1, 0]
    assert t.children[0] == [1, 4]


def test_json_roundtrip():
    t = sample_plane_tree(20, np.random.default_rng(3))
    data = json.loads(json.dumps(t.to_dict()))
    assert set(data) == {"n", "parent"}
    assert PlaneTree.from_dict(data) == t


def test_invalid_parent_rejected():
    with pytest.raises(ValueError):
        PlaneTree(2, np.array([-1, 2, 0]))
    with pytest.raises(ValueError):
        PlaneTree(2, np.array([0, 0, 1]))
