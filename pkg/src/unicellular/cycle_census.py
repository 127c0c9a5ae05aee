"""Short-cycle counts, systole and girth of multigraphs.

A cycle is a closed sequence of distinct vertices and distinct edges; two
sequences describe the same cycle when they differ by rotation and/or
reversal. Parallel edges are told apart by edge id, so a pair of parallel
edges is a 2-cycle and every loop is a 1-cycle.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .decorated_map import DecoratedTree, MultiGraph

K_MAX_GUARD = 12
# bound on frontier rows materialised at once by the vectorised search
_FRONTIER_ROWS = 500_000

Cycle = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class CycleCensus:
    """counts[k-1] = number of cycles of length k, for k = 1..k_max.

    ``systole`` is None when no cycle of length <= k_max exists.
    """

    k_max: int
    counts: tuple[int, ...]

    @property
    def systole(self) -> int | None:
        for k, c in enumerate(self.counts, start=1):
            if c:
                return k
        return None

    def count(self, k: int) -> int:
        return self.counts[k - 1]

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "counts": list(self.counts), "systole": self.systole}


def canonical_cycle(vertices, edges) -> Cycle:
    """Smallest representative of a cycle under rotation and reversal.

    ``edges[i]`` joins ``vertices[i]`` to ``vertices[(i+1) % k]``.
    """
    vs = tuple(vertices)
    es = tuple(edges)
    k = len(vs)
    if k == 0 or len(es) != k:
        raise ValueError("a cycle needs as many edges as vertices (>= 1)")
    best = None
    # reversal: v0, v_{k-1}, ..., v1 with edges e_{k-1}, ..., e_0
    rev_vs = (vs[0],) + vs[:0:-1]
    rev_es = es[::-1]
    for cand_vs, cand_es in ((vs, es), (rev_vs, rev_es)):
        for r in range(k):
            key = tuple(zip(cand_vs[r:] + cand_vs[:r], cand_es[r:] + cand_es[:r]))
            if best is None or key < best:
                best = key
    return tuple(v for v, _ in best), tuple(e for _, e in best)


def _check_k_max(k_max: int) -> None:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if k_max > K_MAX_GUARD:
        raise ValueError(f"k_max > {K_MAX_GUARD} refused (cost guard)")


def _loops_and_digons(g: MultiGraph, want_cycles: bool):
    e = g.edges
    loop_ids = np.flatnonzero(e[:, 0] == e[:, 1])
    loops = [((int(e[i, 0]),), (int(i),)) for i in loop_ids] if want_cycles else []
    proper = np.flatnonzero(e[:, 0] != e[:, 1])
    lo = np.minimum(e[proper, 0], e[proper, 1])
    hi = np.maximum(e[proper, 0], e[proper, 1])
    digon_count = 0
    digons: list[Cycle] = []
    if proper.size:
        keys = lo * g.v_count + hi
        _, inverse, mult = np.unique(keys, return_inverse=True, return_counts=True)
        digon_count = int((mult * (mult - 1) // 2).sum())
        if want_cycles and digon_count:
            groups: dict[int, list[int]] = {}
            for idx in np.flatnonzero(mult[inverse] > 1):
                groups.setdefault(int(inverse[idx]), []).append(int(proper[idx]))
            for ids in groups.values():
                u, v = int(min(e[ids[0]])), int(max(e[ids[0]]))
                for i, a in enumerate(ids):
                    for b in ids[i + 1:]:
                        digons.append(((u, v), (a, b)))
    return len(loop_ids), loops, digon_count, digons


def _expand(g: MultiGraph, verts: np.ndarray):
    """All incidences (row, edge, neighbour) of the last vertex of every row."""
    indptr, inc_edge, inc_nbr = g.indptr, g.inc_edge, g.inc_nbr
    cur = verts[:, -1]
    deg = indptr[cur + 1] - indptr[cur]
    rows = np.repeat(np.arange(len(verts)), deg)
    offsets = np.repeat(np.cumsum(deg) - deg, deg)
    pos = indptr[cur][rows] + (np.arange(rows.size) - offsets)
    return rows, inc_edge[pos], inc_nbr[pos]


def _slices(g: MultiGraph, verts: np.ndarray):
    """Row ranges of ``verts`` whose expansion stays within the row budget."""
    cur = verts[:, -1]
    work = np.cumsum(g.indptr[cur + 1] - g.indptr[cur])
    lo = 0
    while lo < len(verts):
        base = work[lo - 1] if lo else 0
        hi = int(np.searchsorted(work, base + _FRONTIER_ROWS, side="right"))
        hi = max(hi, lo + 1)
        yield lo, hi
        lo = hi


def _grow(g, verts, path_edges, k_max, counts, found):
    """Extend paths by one edge, counting closures, depth-first over slices.

    Paths grow from their start through strictly larger vertices only; a
    closing edge back to the start yields each cycle twice (once per
    direction), and only the direction whose first edge id is smaller than
    the closing edge id is kept. Memory stays O(budget * k_max) however
    dense the graph is.
    """
    j = verts.shape[1] - 1
    for lo, hi in _slices(g, verts):
        vs, es = verts[lo:hi], path_edges[lo:hi]
        rows, nxt_e, nxt_v = _expand(g, vs)
        start = vs[rows, 0]
        if j >= 2:
            close = (nxt_v == start) & (es[rows, 0] < nxt_e)
            counts[j] += int(close.sum())
            if found is not None:
                for r, ce in zip(rows[close].tolist(), nxt_e[close].tolist()):
                    found.append((tuple(vs[r].tolist()), tuple(es[r].tolist()) + (ce,)))
        if j + 1 >= k_max:
            continue
        ok = (nxt_v > start) & (vs[rows] != nxt_v[:, None]).all(axis=1)
        if ok.any():
            _grow(
                g,
                np.concatenate([vs[rows[ok]], nxt_v[ok][:, None]], axis=1),
                np.concatenate([es[rows[ok]], nxt_e[ok][:, None]], axis=1),
                k_max, counts, found,
            )


def _long_cycles(g: MultiGraph, k_max: int, counts: list[int], found: list[Cycle] | None):
    """Cycles of length 3..k_max, each found from its smallest vertex."""
    e = g.edges
    proper = e[:, 0] != e[:, 1]
    src = np.concatenate([e[proper, 0], e[proper, 1]])
    dst = np.concatenate([e[proper, 1], e[proper, 0]])
    eid = np.concatenate([np.flatnonzero(proper)] * 2)
    keep = dst > src
    if keep.any():
        _grow(g, np.stack([src[keep], dst[keep]], axis=1), eid[keep][:, None], k_max, counts, found)


def count_short_cycles(g: MultiGraph, k_max: int = 6) -> CycleCensus:
    """Census of cycles of every length 1..k_max in a multigraph."""
    return _census(g, k_max, want_cycles=False)[0]


def enumerate_short_cycles(g: MultiGraph, k_max: int = 6) -> tuple[CycleCensus, list[Cycle]]:
    """Census plus one explicit (vertices, edges) representative per cycle.

    Representatives start at the smallest vertex; ``edges[i]`` joins
    ``vertices[i]`` and ``vertices[i+1]`` (cyclically).
    """
    return _census(g, k_max, want_cycles=True)


def _census(g: MultiGraph, k_max: int, want_cycles: bool):
    _check_k_max(k_max)
    counts = [0] * k_max
    n_loops, loops, n_digons, digons = _loops_and_digons(g, want_cycles)
    counts[0] = n_loops
    found: list[Cycle] = loops + (digons if k_max >= 2 else [])
    if k_max >= 2:
        counts[1] = n_digons
    if k_max >= 3 and g.v_count:
        longer: list[Cycle] | None = [] if want_cycles else None
        _long_cycles(g, k_max, counts, longer)
        if want_cycles:
            found.extend(longer)
    return CycleCensus(k_max, tuple(counts)), found


def brute_force_cycle_count(g: MultiGraph, k_max: int) -> CycleCensus:
    """Exhaustive oracle: walk every vertex/edge sequence, dedupe by canonical form."""
    if g.v_count > 10 or g.e_count > 14:
        raise ValueError("brute force guarded to <= 10 vertices and <= 14 edges")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.v_count)}
    for e, (u, v) in enumerate(g.edges.tolist()):
        adj[u].append((e, v))
        if u != v:
            adj[v].append((e, u))
    seen: set[Cycle] = set()

    def extend(vs, es):
        k = len(es)
        for e, w in adj[vs[-1]]:
            if e in es:
                continue
            if w == vs[0] and k + 1 <= k_max:
                seen.add(canonical_cycle(vs, es + [e]))
            if w not in vs and k + 1 < k_max:
                extend(vs + [w], es + [e])

    for v in range(g.v_count):
        extend([v], [])
    counts = Counter(len(vs) for vs, _ in seen)
    return CycleCensus(k_max, tuple(counts.get(k, 0) for k in range(1, k_max + 1)))


def girth(g: MultiGraph, limit: int | None = None) -> int | None:
    """Length of the shortest cycle (None if acyclic or longer than ``limit``).

    Breadth-first search from every vertex; a non-tree edge between u and w
    closes a closed walk of length dist[u] + dist[w] + 1, and the minimum
    over all roots is the girth.
    """
    e = g.edges
    if np.any(e[:, 0] == e[:, 1]):
        return 1
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    if len(np.unique(lo * g.v_count + hi)) < g.e_count:
        return 2
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.v_count)]
    for i, (u, v) in enumerate(e.tolist()):
        adj[u].append((i, v))
        adj[v].append((i, u))
    best = None
    depth_cap = None if limit is None else limit // 2 + 1
    for root in range(g.v_count):
        dist = {root: 0}
        via = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if depth_cap is not None and dist[u] >= depth_cap:
                continue
            if best is not None and 2 * dist[u] >= best:
                break
            for i, w in adj[u]:
                if i == via[u]:
                    continue
                if w in dist:
                    length = dist[u] + dist[w] + 1
                    if best is None or length < best:
                        best = length
                else:
                    dist[w] = dist[u] + 1
                    via[w] = i
                    queue.append(w)
    if best is not None and limit is not None and best > limit:
        return None
    return best


def validate_cycle_decomposition(d: DecoratedTree, vertices, edges) -> bool:
    """Check that a quotient cycle pulls back to tree paths obeying C1-C3.

    Walking the cycle, consecutive edges either meet at the same tree vertex
    (the tree path continues) or at two distinct vertices of one sigma-cycle
    (a path ends and the next begins). The resulting list must consist of
    pairwise disjoint simple tree paths with total length equal to the cycle
    length (C1), end/start of consecutive paths merged (C2), and no other
    merged pair among all path vertices (C3).
    """
    vs = [int(v) for v in vertices]
    es = [int(e) for e in edges]
    k = len(vs)
    if k == 0 or len(es) != k:
        raise ValueError("a cycle needs as many edges as vertices (>= 1)")
    cls = d.classes
    tree = d.tree
    oriented = []
    for i, e in enumerate(es):
        if not 0 <= e < tree.n:
            raise ValueError(f"edge {e} is not an edge of the tree")
        a, b = tree.edge(e)
        want = (vs[i], vs[(i + 1) % k])
        if (cls[a], cls[b]) == want:
            oriented.append((a, b))
        elif (cls[b], cls[a]) == want:
            oriented.append((b, a))
        else:
            raise ValueError(f"edge {e} does not join cycle vertices {want}")
    if len(set(es)) != k:
        return False

    # split where arrival and departure tree vertices differ
    breaks = [i for i in range(k) if oriented[i - 1][1] != oriented[i][0]]
    if not breaks:
        return False
    paths = []
    for bi, start in enumerate(breaks):
        stop = breaks[(bi + 1) % len(breaks)]
        span = (stop - start) % k or k
        path = [oriented[start][0]]
        for step in range(span):
            path.append(oriented[(start + step) % k][1])
        paths.append(path)

    if sum(len(p) - 1 for p in paths) != k:
        return False
    used: set[int] = set()
    for p in paths:
        if len(set(p)) != len(p) or used & set(p):
            return False
        used.update(p)
    s = len(paths)
    links = set()
    for i in range(s):
        end, nxt = paths[i][-1], paths[(i + 1) % s][0]
        if cls[end] != cls[nxt]:
            return False
        links.add(frozenset((end, nxt)))
    by_class: dict[int, list[int]] = {}
    for v in used:
        by_class.setdefault(int(cls[v]), []).append(v)
    for members in by_class.values():
        if len(members) == 1:
            continue
        if len(members) != 2 or frozenset(members) not in links:
            return False
    return True
