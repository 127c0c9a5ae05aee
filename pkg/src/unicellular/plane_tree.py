"""Uniform plane trees: sampling, enumeration, and path/degree observables."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property

import numpy as np

ROOT_PARENT = -1


@dataclass(frozen=True, eq=False)
class PlaneTree:
    """Rooted ordered tree with ``n`` edges and preorder vertex ids 0..n.

    ``parent[0] == -1``; vertex ``i + 1`` hangs from tree edge ``i``.
    """

    n: int
    parent: np.ndarray

    def __post_init__(self):
        parent = np.asarray(self.parent, dtype=np.int64)
        object.__setattr__(self, "parent", parent)
        if self.n < 1 or parent.shape != (self.n + 1,):
            raise ValueError(f"parent array must have length n+1 = {self.n + 1}")
        if parent[0] != ROOT_PARENT:
            raise ValueError("vertex 0 must be the root")
        # preorder numbering implies parent[v] < v, hence connected and acyclic
        if not np.all(parent[1:] < np.arange(1, self.n + 1)) or np.any(parent[1:] < 0):
            raise ValueError("parent array is not a preorder-labelled tree")

    root = 0

    @cached_property
    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(self.n + 1)]
        for v, p in enumerate(self.parent.tolist()):
            if p >= 0:
                kids[p].append(v)
        return kids

    @cached_property
    def depth(self) -> np.ndarray:
        depth = np.zeros(self.n + 1, dtype=np.int64)
        par = self.parent.tolist()
        out = depth.tolist()
        for v in range(1, self.n + 1):
            out[v] = out[par[v]] + 1
        return np.asarray(out, dtype=np.int64)

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.parent[1:], minlength=self.n + 1)
        deg[1:] += 1
        return deg

    def edge(self, e: int) -> tuple[int, int]:
        """Endpoints (parent, child) of tree edge ``e``."""
        return int(self.parent[e + 1]), e + 1

    def key(self) -> tuple[int, ...]:
        return tuple(self.parent.tolist())

    def __eq__(self, other):
        if not isinstance(other, PlaneTree):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.parent, other.parent)

    def __hash__(self):
        return hash(self.key())

    def to_dict(self) -> dict:
        return {"n": self.n, "parent": self.parent.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "PlaneTree":
        return cls(int(data["n"]), np.asarray(data["parent"], dtype=np.int64))


def from_dyck(steps) -> PlaneTree:
    """Decode a Dyck word (+1 = descend to a new child, -1 = return) in preorder."""
    steps = [int(s) for s in steps]
    n = len(steps) // 2
    parent = [ROOT_PARENT] * (n + 1)
    stack = [0]
    nxt = 1
    for s in steps:
        if s == 1:
            parent[nxt] = stack[-1]
            stack.append(nxt)
            nxt += 1
        else:
            stack.pop()
    return PlaneTree(n, np.asarray(parent, dtype=np.int64))


def sample_plane_tree(n: int, rng: np.random.Generator) -> PlaneTree:
    """Uniform plane tree with n edges via the cycle lemma.

    A uniform arrangement of n up-steps and n+1 down-steps has exactly one
    rotation that stays nonnegative until its final step; dropping that final
    down-step leaves a uniform Dyck path of length 2n.
    """
    if n < 1:
        raise ValueError(f"plane trees need n >= 1 edges, got {n}")
    steps = np.full(2 * n + 1, -1, dtype=np.int8)
    steps[:n] = 1
    steps = rng.permutation(steps)
    partial = np.cumsum(steps, dtype=np.int64)
    # first index where the walk reaches its minimum; rotate to start after it
    j = int(np.argmin(partial)) + 1
    rotated = np.concatenate([steps[j:], steps[:j]])
    return from_dyck(rotated[:-1])


def enumerate_plane_trees(n: int) -> list[PlaneTree]:
    """All Catalan(n) plane trees with n edges, built recursively as ordered forests."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 10:
        raise ValueError("enumeration guarded to n <= 10")

    def forests(edges):
        if edges == 0:
            yield ()
            return
        for first in range(edges):
            for sub in forests(first):
                for rest in forests(edges - first - 1):
                    yield (sub,) + rest

    trees = []
    for shape in forests(n):
        parent = [ROOT_PARENT]

        def walk(node, me):
            for child in node:
                parent.append(me)
                walk(child, len(parent) - 1)

        walk(shape, 0)
        trees.append(PlaneTree(n, np.asarray(parent, dtype=np.int64)))
    return trees


def _depth_profiles(tree: PlaneTree, ell: int) -> np.ndarray:
    """down[v, d] = number of descendants of v at depth exactly d below v, d <= ell."""
    down = np.zeros((tree.n + 1, ell + 1), dtype=np.int64)
    down[:, 0] = 1
    depth = tree.depth
    order = np.argsort(depth, kind="stable")
    bounds = np.searchsorted(depth[order], np.arange(depth.max() + 2))
    for d in range(int(depth.max()), 0, -1):
        vs = order[bounds[d]:bounds[d + 1]]
        np.add.at(down[:, 1:], tree.parent[vs], down[vs, :-1])
    return down


def count_paths(tree: PlaneTree, ell: int) -> int:
    """Number of oriented simple paths of length ell (ordered pairs at distance ell)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    down = _depth_profiles(tree, ell)
    # pairs where one end is an ancestor of the other
    vertical = int(down[:, ell].sum())
    # pairs through a common ancestor v via two distinct children:
    # half of (all child-profile pairs) minus (same-child pairs)
    crossing = 0
    for a in range(ell - 1):
        b = ell - 2 - a
        crossing += int(np.dot(down[:, a + 1], down[:, b + 1]))
        crossing -= int(np.dot(down[1:, a], down[1:, b]))
    return 2 * (vertical + crossing // 2)


def tree_degree_histogram(tree: PlaneTree) -> dict[int, int]:
    counts = Counter(tree.degrees().tolist())
    return dict(sorted(counts.items()))
