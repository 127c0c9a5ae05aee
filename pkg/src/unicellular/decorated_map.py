"""C-decorated trees and their underlying multigraphs."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cperm import CPermutation
from .plane_tree import PlaneTree


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Undirected multigraph on vertices 0..v_count-1.

    ``edges[e] = (u, v)``; loops (u == v) and parallel edges are allowed. The
    incidence structure is CSR-shaped: the entries of vertex v live in
    ``inc_edge[indptr[v]:indptr[v+1]]`` / ``inc_nbr[...]``, ordered by edge id,
    and a loop contributes two entries at its vertex.
    """

    v_count: int
    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", edges)
        if edges.size and (edges.min() < 0 or edges.max() >= self.v_count):
            raise ValueError("edge endpoint out of range")

    @property
    def e_count(self) -> int:
        return len(self.edges)

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        e = np.arange(self.e_count)
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eid = np.concatenate([e, e])
        order = np.lexsort((eid, src))
        indptr = np.zeros(self.v_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.v_count), out=indptr[1:])
        return indptr, eid[order], dst[order]

    @property
    def indptr(self) -> np.ndarray:
        return self._csr[0]

    @property
    def inc_edge(self) -> np.ndarray:
        return self._csr[1]

    @property
    def inc_nbr(self) -> np.ndarray:
        return self._csr[2]

    def incidence(self, v: int) -> list[tuple[int, int]]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.inc_edge[lo:hi].tolist(), self.inc_nbr[lo:hi].tolist()))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.v_count)

    def to_dict(self) -> dict:
        return {"v": self.v_count, "edges": self.edges.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "MultiGraph":
        return cls(int(data["v"]), np.asarray(data["edges"], dtype=np.int64))


@dataclass(frozen=True)
class DecoratedTree:
    """A plane tree with n edges and a C-permutation of its n+1 vertices."""

    tree: PlaneTree
    perm: CPermutation

    def __post_init__(self):
        if self.perm.n_elems != self.tree.n + 1:
            raise ValueError("permutation must act on the n+1 tree vertices")

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def m(self) -> int:
        return self.perm.m

    @property
    def genus(self) -> int:
        return (self.tree.n + 1 - self.perm.m) // 2

    @cached_property
    def classes(self) -> np.ndarray:
        """tree vertex -> merged vertex (index of its sigma-cycle)."""
        return self.perm.cycle_index()

    def equivalent(self, v: int, w: int) -> bool:
        return bool(self.classes[v] == self.classes[w])


def underlying_graph(d: DecoratedTree) -> MultiGraph:
    """Merge tree vertices lying in the same sigma-cycle.

    Graph vertex i is the i-th cycle (cycles ordered by smallest label) and
    graph edge e is tree edge e, i.e. the edge above preorder vertex e+1.
    """
    cls = d.classes
    child = np.arange(1, d.n + 1)
    edges = np.stack([cls[d.tree.parent[1:]], cls[child]], axis=1)
    return MultiGraph(d.m, edges)


def graph_degree_histogram(g: MultiGraph) -> dict[int, int]:
    """degree -> number of vertices; a loop adds 2 to its vertex."""
    return dict(sorted(Counter(g.degrees().tolist()).items()))
