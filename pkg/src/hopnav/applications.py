"""Algorithms layered on the navigation oracle: approximate shortest-path
trees and MSTs, sparsification, tree products and online MST verification."""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .hopspanner import RecursionTree, build
from .pathquery import (
    INFO_K,
    INFO_NODE,
    INFO_ROOT,
    INFO_SEG_END,
    INFO_SEG_START,
    Annotation,
    _replay_groups,
    annotate,
    product_query,
    raw_path,
)
from .treecover import FiniteMetric, MetricNavigator, metric_find_path
from .treemetric import WeightedTree


class _Top:
    """Greater than every number; stands in for an unreached distance."""

    def __gt__(self, other):
        return not isinstance(other, _Top)

    def __lt__(self, other):
        return False

    def __ge__(self, other):
        return True

    def __le__(self, other):
        return isinstance(other, _Top)

    def __eq__(self, other):
        return isinstance(other, _Top)

    def __hash__(self):
        return 0

    def __repr__(self):
        return "inf"


INF = _Top()


@dataclass
class SptResult:
    root: int
    parent: dict
    dist: dict
    edge_weight: dict = field(default_factory=dict)

    def tree_edges(self):
        return [(v, p) for v, p in self.parent.items() if p is not None]


def approximate_spt(nav: MetricNavigator, rt: int, on_relax=None) -> SptResult:
    """Relax the k-hop oracle path from ``rt`` to every point, edge by edge
    in order. ``on_relax(result)`` runs after every successful relaxation."""
    n = nav.n
    if not 0 <= rt < n:
        raise KeyError(f"unknown root {rt}")
    res = SptResult(rt, {rt: None}, {rt: 0})
    dist, parent, ew = res.dist, res.parent, res.edge_weight

    def relax(x, y, w):
        dy = dist.get(y, INF)
        cand = dist[x] + w
        if dy > cand:
            dist[y] = cand
            parent[y] = x
            ew[y] = w
            if on_relax is not None:
                on_relax(res)

    for v in range(n):
        if v == rt:
            continue
        path, i = metric_find_path(nav, rt, v)
        sp = nav.structures[i][0]
        local = _local_ids(nav, i, path.vertices)
        for (x, y), (lx, ly) in zip(zip(path.vertices, path.vertices[1:]),
                                    zip(local, local[1:])):
            relax(x, y, sp.weight(lx, ly))
    return res


def _local_ids(nav, i, verts):
    n = nav.n
    off = nav._offsets[i]
    return [x if x < n else x - off + n for x in verts]


def spt_is_tree(res: SptResult) -> bool:
    """Every vertex reaches the root along parent links without repeats."""
    for v in res.parent:
        seen = set()
        x = v
        while x is not None:
            if x in seen:
                return False
            seen.add(x)
            x = res.parent.get(x, "missing")
            if x == "missing":
                return False
    return True


def spt_ancestor_violations(res: SptResult, rtol=1e-12) -> int:
    """Count pairs (ancestor a, v) with dist(a) + d_T(a, v) > dist(v)."""
    bad = 0
    for v in res.parent:
        acc = 0
        x = v
        while res.parent[x] is not None:
            acc += res.edge_weight[x]
            x = res.parent[x]
            lhs = res.dist[x] + acc
            if lhs > res.dist[v] + rtol * abs(res.dist[v]):
                bad += 1
    return bad


def prim_mst(M: FiniteMetric):
    """Exact MST of a dense metric; returns (edges, weight)."""
    d = M.dist
    n = M.n
    if n == 0:
        return [], 0
    in_tree = np.zeros(n, dtype=bool)
    best = d[0].astype(np.float64).copy()
    frm = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    best[0] = np.inf
    edges = []
    total = d.dtype.type(0)
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        y = int(np.argmin(cand))
        x = int(frm[y])
        edges.append((x, y))
        total = total + d[x, y]
        in_tree[y] = True
        closer = (~in_tree) & (d[y] < best)
        best[closer] = d[y][closer]
        frm[closer] = y
    return edges, total.item() if hasattr(total, "item") else total


def approximate_mst(M: FiniteMetric, nav: MetricNavigator):
    """Replace each MST edge by its oracle path and take a BFS spanning tree of
    the union. Returns ``(edges [(a, b, w)], total weight)``."""
    base, _ = prim_mst(M)
    H = {}
    for a, b in base:
        path, i = metric_find_path(nav, a, b)
        sp = nav.structures[i][0]
        local = _local_ids(nav, i, path.vertices)
        for (x, y), (lx, ly) in zip(zip(path.vertices, path.vertices[1:]),
                                    zip(local, local[1:])):
            key = (x, y) if x < y else (y, x)
            w = sp.weight(lx, ly)
            if key not in H or w < H[key]:
                H[key] = w
    adj = {}
    for (a, b), w in H.items():
        adj.setdefault(a, []).append((b, w))
        adj.setdefault(b, []).append((a, w))
    if not adj:
        return [], 0
    start = min(x for x in adj if x < M.n) if M.n else min(adj)
    seen = {start}
    out = []
    q = deque([start])
    while q:
        x = q.popleft()
        for y, w in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                out.append((x, y, w))
                q.append(y)
    return out, sum(w for _, _, w in out)


def sparsify(edges, nav: MetricNavigator):
    """Replace every edge ``(a, b[, w])`` by its oracle path; returns the union
    ``{(x, y): w}`` with x < y."""
    out = {}
    for e in edges:
        a, b = int(e[0]), int(e[1])
        if a == b:
            continue
        path, i = metric_find_path(nav, a, b)
        sp = nav.structures[i][0]
        local = _local_ids(nav, i, path.vertices)
        for (x, y), (lx, ly) in zip(zip(path.vertices, path.vertices[1:]),
                                    zip(local, local[1:])):
            key = (x, y) if x < y else (y, x)
            w = sp.weight(lx, ly)
            if key not in out or w < out[key]:
                out[key] = w
    return out


def dijkstra(n, edges: dict, src):
    adj = [[] for _ in range(n)]
    for (a, b), w in edges.items():
        adj[a].append((b, w))
        adj[b].append((a, w))
    dist = [math.inf] * n
    dist[src] = 0
    pq = [(0, src)]
    while pq:
        d, x = heapq.heappop(pq)
        if d > dist[x]:
            continue
        for y, w in adj[x]:
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(pq, (nd, y))
    return dist


def greedy_spanner(M: FiniteMetric, t: float) -> dict:
    """Classic greedy t-spanner of a metric: ``{(a, b): w}``."""
    n = M.n
    pairs = sorted((M.dist[a, b].item(), a, b) for a in range(n) for b in range(a + 1, n))
    out = {}
    for w, a, b in pairs:
        if dijkstra_bounded(n, out, a, b, t * w) > t * w:
            out[(a, b)] = w
    return out


def dijkstra_bounded(n, edges, src, dst, bound):
    adj = {}
    for (a, b), w in edges.items():
        adj.setdefault(a, []).append((b, w))
        adj.setdefault(b, []).append((a, w))
    dist = {src: 0}
    pq = [(0, src)]
    while pq:
        d, x = heapq.heappop(pq)
        if x == dst:
            return d
        if d > dist.get(x, math.inf) or d > bound:
            continue
        for y, w in adj.get(x, ()):
            nd = d + w
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(pq, (nd, y))
    return math.inf


def stretch(M: FiniteMetric, edges: dict, points=None) -> float:
    """Largest ratio of graph distance to metric distance over point pairs."""
    pts = range(M.n) if points is None else points
    nv = max([M.n] + [max(k) + 1 for k in edges]) if edges else M.n
    worst = 1.0
    for a in pts:
        d = dijkstra(nv, edges, a)
        for b in pts:
            if a != b:
                worst = max(worst, d[b] / M.dist[a, b])
    return float(worst)


def tree_product(D: RecursionTree, ann: Annotation, u, v, counter=None):
    """Semigroup product along the tree path u -> v (at most k - 1 operations)."""
    return product_query(D, ann, u, v, counter)


# -- online MST verification ---------------------------------------------------


class VerifierState:
    """Max-annotated spanner of a weighted tree, plus order ranks of the
    edges of every k = 2 structure (and of base nodes at higher levels)."""

    def __init__(self, tree: WeightedTree, k: int, ranks=True):
        self.tree = tree
        self.k = k
        self.spanner, self.D = build(tree, tree.root, None, k)
        w = tree.weight.tolist()
        self.ann = annotate(self.D, w, max)
        self.rank = {}
        if ranks:
            self._rank_structures()

    def _rank_structures(self):
        D = self.D
        n = D.n
        w = self.tree.weight.tolist()
        groups = []
        for node, _inst, g0, g1, _c0, _c1 in D.k2_roots:
            groups.append((("k2", int(D.tree_root[node])), g0, g1))
        for node, g in D.base_group.items():
            if D.node_k[node] > 2 and D.node_k[node] % 2 == 0:
                groups.append((("base", int(node)), g, g + 1))
        # chain folds were already computed for the full annotation; reuse them
        from .pathquery import _fold_chains
        up, down = _fold_chains(D, w, max)

        def val(e, upward):
            if e < n:
                return w[e]
            return up[e] if upward else down[e]

        for key, g0, g1 in groups:
            ann = Annotation(max)
            _replay_groups(D, g0, g1, ann, val)
            order = sorted(ann.values, key=lambda e: ann.values[e][0])
            self.rank[key] = {e: r + 1 for r, e in enumerate(order)}

    def path_max(self, u, v):
        return product_query(self.D, self.ann, u, v)


def verify_mst_edge(V: VerifierState, u: int, v: int, w_query, optimized=False):
    """``(w_query > max tree weight on the u-v path, weight comparisons)``."""
    tree = V.tree
    if u == v or tree.parent[u] == v or tree.parent[v] == u:
        raise ValueError(f"({u}, {v}) is a tree edge or a loop")
    verts, info = raw_path(V.D, u, v)
    edges = list(zip(verts[:-1], verts[1:]))
    vals = [V.ann.directed(a, b) for a, b in edges]
    comparisons = 0
    lo, hi = int(info[INFO_SEG_START]), int(info[INFO_SEG_END])
    ranks = None
    if optimized and V.k % 2 == 0 and len(edges) == V.k and hi - lo >= 2:
        if int(info[INFO_K]) == 2:
            ranks = V.rank.get(("k2", int(info[INFO_ROOT])))
        else:
            ranks = V.rank.get(("base", int(info[INFO_NODE])))
    if ranks is not None:
        # the innermost segment's maximum is read off the order ranks
        seg = range(lo, hi)
        best = max(seg, key=lambda j: ranks[_key(*edges[j])])
        rest = [vals[j] for j in range(len(edges)) if j not in seg] + [vals[best]]
    else:
        rest = vals
    acc = rest[0]
    for x in rest[1:]:
        comparisons += 1
        if x > acc:
            acc = x
    comparisons += 1
    return bool(w_query > acc), comparisons


def _key(a, b):
    return (a, b) if a < b else (b, a)


def eval_lower_bound(n: int, k: int) -> float:
    """Edge lower bounds for 1-spanners of the uniform line:
    k = 2: n log2(n) / 8; k = 3: n - 1 below 25600 points, else n log2 log2 n / 51200."""
    if k == 2:
        return n * math.log2(n) / 8 if n > 0 else 0.0
    if k == 3:
        if n < 25600:
            return float(n - 1)
        return n * math.log2(math.log2(n)) / 51200
    raise ValueError("lower bounds are defined for k in {2, 3}")
