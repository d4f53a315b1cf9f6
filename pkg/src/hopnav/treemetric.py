"""Rooted edge-weighted trees, the Prune / Decompose primitives, and tree I/O.

Vertices are dense integers ``0..n-1``. Files may use arbitrary integer ids;
those are kept in :attr:`WeightedTree.ids` and mapped back on output.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._jit import njit


class TreeFormatError(ValueError):
    """Malformed tree input (bad ids, cycles, duplicate edges, ...)."""


@dataclass(frozen=True)
class TreePath:
    vertices: tuple
    weight: float

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True, eq=False)
class WeightedTree:
    """Rooted tree stored as parent links.

    ``weight[v]`` is the weight of the edge ``(v, parent[v])``; it is 0 at the
    root. ``required`` flags the vertices that must be served; the others are
    Steiner vertices.
    """

    parent: np.ndarray
    weight: np.ndarray
    root: int
    required: np.ndarray
    ids: np.ndarray

    @property
    def n(self) -> int:
        return len(self.parent)

    def __len__(self):
        return len(self.parent)

    @classmethod
    def from_edges(cls, n, edges, root=0, required=None, ids=None):
        """Build from an undirected edge list ``[(u, v, w), ...]`` over ``0..n-1``."""
        if n <= 0:
            raise TreeFormatError("a tree needs at least one vertex")
        edges = list(edges)
        if len(edges) != n - 1:
            raise TreeFormatError(f"expected {n - 1} edges, got {len(edges)}")
        if not 0 <= root < n:
            raise TreeFormatError(f"root {root} out of range")
        adj = [[] for _ in range(n)]
        seen = set()
        integral = True
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise TreeFormatError(f"edge ({u}, {v}) has an unknown endpoint")
            if u == v:
                raise TreeFormatError(f"self loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise TreeFormatError(f"duplicate edge {key}")
            seen.add(key)
            if w < 0:
                raise TreeFormatError(f"negative weight on edge {key}")
            if isinstance(w, float) and not float(w).is_integer():
                integral = False
            adj[u].append((v, w))
            adj[v].append((u, w))
        dtype = np.int64 if integral else np.float64
        parent = np.full(n, -1, dtype=np.int64)
        weight = np.zeros(n, dtype=dtype)
        visited = np.zeros(n, dtype=bool)
        visited[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, w in adj[x]:
                if not visited[y]:
                    visited[y] = True
                    parent[y] = x
                    weight[y] = w
                    queue.append(y)
        if not visited.all():
            raise TreeFormatError("edges do not connect all vertices")
        return cls._make(parent, weight, root, required, ids)

    @classmethod
    def from_parent(cls, parent, weight, root=None, required=None, ids=None):
        parent = np.asarray(parent, dtype=np.int64)
        if root is None:
            roots = np.flatnonzero(parent < 0)
            if len(roots) != 1:
                raise TreeFormatError("parent array must have exactly one root")
            root = int(roots[0])
        tree = cls._make(parent.copy(), np.asarray(weight).copy(), root, required, ids)
        tree.order  # validates acyclicity
        return tree

    @classmethod
    def _make(cls, parent, weight, root, required, ids):
        n = len(parent)
        if required is None:
            req = np.ones(n, dtype=bool)
        else:
            req = np.asarray(required)
            if req.dtype != bool:
                mask = np.zeros(n, dtype=bool)
                mask[np.asarray(list(req), dtype=np.int64)] = True
                req = mask
            if len(req) != n:
                raise TreeFormatError("required mask has the wrong length")
        if ids is None:
            ids = np.arange(n, dtype=np.int64)
        else:
            ids = np.asarray(ids, dtype=np.int64)
            if len(np.unique(ids)) != n:
                raise TreeFormatError("vertex ids must be distinct")
        if np.any(weight < 0):
            raise TreeFormatError("negative edge weight")
        weight = weight.copy()
        weight[root] = 0
        return cls(parent, weight, int(root), req.copy(), ids)

    # -- derived structure --------------------------------------------------

    @cached_property
    def index(self) -> dict:
        """External id -> dense vertex."""
        return {int(x): i for i, x in enumerate(self.ids)}

    @cached_property
    def children(self):
        kids = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(v)
        return kids

    @cached_property
    def order(self) -> np.ndarray:
        """BFS order from the root; parents precede children."""
        order = _bfs_order(self.parent, self.root)
        if len(order) != self.n:
            raise TreeFormatError("parent links do not form a tree")
        return order

    @cached_property
    def depth(self) -> np.ndarray:
        return _depths(self.parent, self.order)

    @cached_property
    def root_distance(self) -> np.ndarray:
        return _root_distances(self.parent, self.weight, self.order)

    @property
    def is_integral(self) -> bool:
        return self.weight.dtype.kind in "iu"

    def edges(self):
        """Undirected edges as ``(child, parent, weight)`` triples."""
        return [(v, int(p), self.weight[v]) for v, p in enumerate(self.parent) if p >= 0]

    def neighbors(self, v):
        out = list(self.children[v])
        if self.parent[v] >= 0:
            out.append(int(self.parent[v]))
        return out

    def edge_weight(self, u, v):
        if self.parent[u] == v:
            return self.weight[u]
        if self.parent[v] == u:
            return self.weight[v]
        raise KeyError(f"({u}, {v}) is not a tree edge")

    def required_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.required)

    def rerooted(self, rt: int) -> "WeightedTree":
        """Same tree hung from ``rt``."""
        if rt == self.root:
            return self
        return WeightedTree.from_edges(
            self.n, [(c, p, w) for c, p, w in self.edges()], rt, self.required, self.ids
        )

    def with_required(self, required) -> "WeightedTree":
        return WeightedTree._make(self.parent, self.weight, self.root, required, self.ids)

    def check_vertex(self, v):
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
            raise KeyError(f"unknown vertex {v!r}")


@njit
def _bfs_order(parent, root):
    n = parent.shape[0]
    # child lists in CSR form
    count = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            count[p + 1] += 1
    for i in range(n):
        count[i + 1] += count[i]
    fill = count[:-1].copy()
    kids = np.empty(max(n - 1, 0), dtype=np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            kids[fill[p]] = v
            fill[p] += 1
    order = np.empty(n, dtype=np.int64)
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        x = order[head]
        head += 1
        for j in range(count[x], count[x + 1]):
            if tail >= n:
                return order[:tail]
            order[tail] = kids[j]
            tail += 1
    return order[:tail]


@njit
def _depths(parent, order):
    depth = np.zeros(parent.shape[0], dtype=np.int64)
    for i in range(1, order.shape[0]):
        v = order[i]
        depth[v] = depth[parent[v]] + 1
    return depth


@njit
def _root_distances(parent, weight, order):
    dist = np.zeros(parent.shape[0], dtype=weight.dtype)
    for i in range(1, order.shape[0]):
        v = order[i]
        dist[v] = dist[parent[v]] + weight[v]
    return dist


# -- distances -----------------------------------------------------------------

def tree_distance(tree: WeightedTree, u: int, v: int):
    """Exact distance and the unique tree path, by walking parent links."""
    tree.check_vertex(u)
    tree.check_vertex(v)
    depth = tree.depth
    parent = tree.parent
    weight = tree.weight
    left, right = [u], [v]
    total = weight.dtype.type(0)
    a, b = u, v
    while depth[a] > depth[b]:
        total += weight[a]
        a = int(parent[a])
        left.append(a)
    while depth[b] > depth[a]:
        total += weight[b]
        b = int(parent[b])
        right.append(b)
    while a != b:
        total += weight[a] + weight[b]
        a = int(parent[a])
        b = int(parent[b])
        left.append(a)
        right.append(b)
    right.pop()
    path = tuple(left + right[::-1])
    return total.item(), TreePath(path, total.item())


@njit
def _all_pairs_kernel(n, adj_start, adj_to, adj_w, out):
    stack = np.empty(n, dtype=np.int64)
    seen = np.empty(n, dtype=np.int64)
    for s in range(n):
        for i in range(n):
            seen[i] = -1
        top = 0
        stack[top] = s
        top += 1
        seen[s] = s
        out[s, s] = 0
        while top > 0:
            top -= 1
            x = stack[top]
            for j in range(adj_start[x], adj_start[x + 1]):
                y = adj_to[j]
                if seen[y] != s:
                    seen[y] = s
                    out[s, y] = out[s, x] + adj_w[j]
                    stack[top] = y
                    top += 1


def all_pairs_distances(tree: WeightedTree) -> np.ndarray:
    """Full distance matrix by a traversal from every vertex (test oracle)."""
    n = tree.n
    start, to, w = adjacency_csr(n, [(c, p) for c, p, _ in tree.edges()],
                                 [x for _, _, x in tree.edges()], tree.weight.dtype)
    out = np.zeros((n, n), dtype=tree.weight.dtype)
    _all_pairs_kernel(n, start, to, w, out)
    return out


def adjacency_csr(n, pairs, weights=None, dtype=np.int64):
    """Symmetric CSR adjacency for an undirected edge list."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    order = np.argsort(src, kind="stable")
    start = np.zeros(n + 1, dtype=np.int64)
    np.add.at(start, src + 1, 1)
    start = np.cumsum(start)
    if weights is None:
        return start, dst[order]
    w = np.asarray(weights, dtype=dtype)
    w = np.concatenate([w, w])
    return start, dst[order], w[order]


# -- local kernels on "instance" trees -----------------------------------------
#
# An instance is a tree given by a parent array in which parent[i] < i and
# vertex 0 is the root. Everything below runs in linear time.

@njit
def decompose_greedy(parent, required, ell):
    """Cut vertices leaving components with at most ``ell`` required vertices.

    Post-order accumulation: a vertex is cut as soon as the required count of
    its residual subtree exceeds ``ell``.
    """
    m = parent.shape[0]
    res = np.zeros(m, dtype=np.int64)
    cut = np.zeros(m, dtype=np.bool_)
    for i in range(m - 1, -1, -1):
        if required[i]:
            res[i] += 1
        if res[i] > ell:
            cut[i] = True
        elif i > 0:
            res[parent[i]] += res[i]
    return cut


@njit
def required_centroid(parent, required, gid):
    """Vertex minimising the largest required count of a remaining component.

    Ties go to the smallest ``gid``.
    """
    m = parent.shape[0]
    sub = np.zeros(m, dtype=np.int64)
    big = np.zeros(m, dtype=np.int64)
    for i in range(m - 1, -1, -1):
        if required[i]:
            sub[i] += 1
        if i > 0:
            p = parent[i]
            sub[p] += sub[i]
            if sub[i] > big[p]:
                big[p] = sub[i]
    total = sub[0]
    best = -1
    best_val = total + 1
    for i in range(m):
        worst = big[i]
        up = total - sub[i]
        if up > worst:
            worst = up
        if worst < best_val or (worst == best_val and gid[i] < gid[best]):
            best_val = worst
            best = i
    return best


@njit
def label_components(parent, cut):
    """Component label per vertex (-1 for cut vertices) and component count."""
    m = parent.shape[0]
    comp = np.full(m, -1, dtype=np.int64)
    c = 0
    for i in range(m):
        if cut[i]:
            continue
        if i == 0 or cut[parent[i]]:
            comp[i] = c
            c += 1
        else:
            comp[i] = comp[parent[i]]
    return comp, c


@njit
def prune_kernel(parent, required):
    """Steiner closure of the required set with degree-2 Steiner vertices spliced.

    Returns ``(keep, new_parent)``: ``keep`` lists retained local vertices in
    increasing order (the first is the new root, the LCA of the required
    set); ``new_parent[j]`` indexes into ``keep``.
    """
    m = parent.shape[0]
    cnt = np.zeros(m, dtype=np.int64)
    branches = np.zeros(m, dtype=np.int64)
    for i in range(m - 1, -1, -1):
        if required[i]:
            cnt[i] += 1
        if i > 0 and cnt[i] > 0:
            cnt[parent[i]] += cnt[i]
            branches[parent[i]] += 1
    total = cnt[0]
    lca = 0
    for i in range(m):
        if cnt[i] == total:
            lca = i
    inside = np.zeros(m, dtype=np.bool_)
    inside[lca] = True
    newid = np.full(m, -1, dtype=np.int64)
    anc = np.full(m, -1, dtype=np.int64)  # nearest kept ancestor-or-self
    keep = np.empty(m, dtype=np.int64)
    new_parent = np.empty(m, dtype=np.int64)
    nk = 0
    for i in range(lca, m):
        if i != lca:
            if cnt[i] == 0 or not inside[parent[i]]:
                continue
            inside[i] = True
        kept = i == lca or required[i] or branches[i] >= 2
        if kept:
            newid[i] = nk
            keep[nk] = i
            if i == lca:
                new_parent[nk] = -1
            else:
                new_parent[nk] = newid[anc[parent[i]]]
            anc[i] = i
            nk += 1
        else:
            anc[i] = anc[parent[i]]
    return keep[:nk], new_parent[:nk]


def _local_view(tree: WeightedTree, rt: int):
    """Local instance arrays (parent[i] < i, root first) for ``tree`` hung at ``rt``."""
    t = tree.rerooted(rt)
    order = t.order
    pos = np.empty(t.n, dtype=np.int64)
    pos[order] = np.arange(t.n)
    lp = np.where(t.parent[order] >= 0, pos[np.maximum(t.parent[order], 0)], -1)
    return t, order, lp


def _as_mask(tree, R):
    if R is None:
        return tree.required.copy()
    mask = np.zeros(tree.n, dtype=bool)
    for v in R:
        tree.check_vertex(int(v))
        mask[int(v)] = True
    return mask


def prune(tree: WeightedTree, rt: int, R: Iterable[int]):
    """Topological minor of ``tree`` spanning ``R``.

    Returns ``(pruned, new_root)``. The pruned tree keeps every vertex of ``R``
    plus at most ``|R| - 1`` Steiner vertices (branch points and the LCA of
    ``R``); each of its edges weighs the tree distance of its endpoints.
    ``pruned.ids`` holds the ids of the retained vertices in ``tree``.
    """
    mask = _as_mask(tree, R)
    if not mask.any():
        raise ValueError("prune needs a non-empty required set")
    t, order, lp = _local_view(tree, rt)
    keep, new_parent = prune_kernel(lp, mask[order])
    verts = order[keep]
    dist = t.root_distance
    wts = np.zeros(len(keep), dtype=t.weight.dtype)
    for j in range(1, len(keep)):
        wts[j] = dist[verts[j]] - dist[verts[new_parent[j]]]
    pruned = WeightedTree._make(
        new_parent.astype(np.int64), wts, 0, mask[verts], tree.ids[verts]
    )
    return pruned, 0


def decompose(tree: WeightedTree, rt: int, R: Iterable[int] | None, ell: int) -> set:
    """Cut vertices such that every component of ``tree - CV`` holds at most
    ``ell`` vertices of ``R``.

    When one vertex can do it (``2 * ell >= |R|``) the required-weighted
    centroid is returned, ties broken by smallest vertex id.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    mask = _as_mask(tree, R)
    t, order, lp = _local_view(tree, rt)
    req = mask[order]
    total = int(req.sum())
    if total <= ell:
        return set()
    if 2 * ell >= total:
        c = required_centroid(lp, req, order)
        return {int(order[c])}
    cut = decompose_greedy(lp, req, ell)
    return {int(v) for v in order[cut]}


# -- text format ---------------------------------------------------------------

def parse_tree(text: str) -> WeightedTree:
    """Parse ``n root`` / ``u v w`` lines / optional ``R: ids...``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise TreeFormatError("empty tree file")
    head = lines[0].split()
    if len(head) != 2:
        raise TreeFormatError("first line must be 'n root'")
    try:
        n, root_id = int(head[0]), int(head[1])
    except ValueError as exc:
        raise TreeFormatError(f"bad header: {lines[0]!r}") from exc
    if n <= 0:
        raise TreeFormatError("n must be positive")
    body = lines[1:]
    req_ids = None
    if body and body[-1].startswith("R:"):
        try:
            req_ids = [int(x) for x in body[-1][2:].split()]
        except ValueError as exc:
            raise TreeFormatError("bad R: line") from exc
        body = body[:-1]
    if len(body) != n - 1:
        raise TreeFormatError(f"expected {n - 1} edge lines, got {len(body)}")
    raw = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 3:
            raise TreeFormatError(f"bad edge line: {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise TreeFormatError(f"bad edge line: {ln!r}") from exc
        w = _parse_weight(parts[2])
        raw.append((u, v, w))
    ids = sorted({root_id} | {u for u, _, _ in raw} | {v for _, v, _ in raw})
    if len(ids) != n:
        raise TreeFormatError(f"found {len(ids)} distinct vertex ids, header says {n}")
    index = {x: i for i, x in enumerate(ids)}
    edges = [(index[u], index[v], w) for u, v, w in raw]
    required = None
    if req_ids is not None:
        required = np.zeros(n, dtype=bool)
        for x in req_ids:
            if x not in index:
                raise TreeFormatError(f"required id {x} is not a vertex")
            required[index[x]] = True
    return WeightedTree.from_edges(n, edges, index[root_id], required, ids)


def _parse_weight(s):
    try:
        return int(s)
    except ValueError:
        try:
            return float(s)
        except ValueError as exc:
            raise TreeFormatError(f"bad weight {s!r}") from exc


def format_tree(tree: WeightedTree) -> str:
    ids = tree.ids
    out = [f"{tree.n} {ids[tree.root]}"]
    for c, p, w in tree.edges():
        out.append(f"{ids[p]} {ids[c]} {_fmt_weight(w)}")
    if not tree.required.all():
        out.append("R: " + " ".join(str(ids[v]) for v in tree.required_vertices()))
    return "\n".join(out) + "\n"


def _fmt_weight(w):
    w = w.item() if hasattr(w, "item") else w
    if isinstance(w, float):
        return repr(w)
    return str(w)


def read_tree(path) -> WeightedTree:
    return parse_tree(Path(path).read_text())


def write_tree(tree: WeightedTree, path) -> None:
    Path(path).write_text(format_tree(tree))


def path_tree(weights: Sequence, required=None) -> WeightedTree:
    """Path ``0 - 1 - ... - len(weights)`` rooted at 0."""
    n = len(weights) + 1
    return WeightedTree.from_edges(n, [(i, i + 1, w) for i, w in enumerate(weights)], 0, required)
