"""k-hop 1-spanners for tree metrics together with their recursion trees.

The builder follows the classic cut-vertex recursion:

* k = 2: one (required-weighted) centroid, joined to every required vertex;
* k = 3: sqrt-sized clusters, cut vertices joined pairwise;
* k >= 4: cut vertices are linked by a recursively built (k-2)-hop spanner
  on the tree pruned to them.

Every level also joins each cut vertex to the required vertices of the
clusters it borders. The recursion is recorded in a :class:`RecursionTree`
whose nodes are *regular* (one centroid), *composite* (a cut-vertex level,
with a contracted tree and a ``next`` pointer to the (k-2) structure) or
*base* (small instances answered by BFS).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._jit import njit
from .ackermann import alpha_prime
from .treeindex import TreeIndex, lca_query
from .treemetric import (
    WeightedTree,
    decompose_greedy,
    label_components,
    prune_kernel,
    required_centroid,
)

REGULAR, COMPOSITE, BASE = 0, 1, 2
KIND_NAMES = {REGULAR: "regular", COMPOSITE: "composite", BASE: "base"}


class _Instance:
    """Tree handed to one recursive call, in local coordinates.

    ``parent[i] < i`` and 0 is the root. ``edge[i]`` is the registry id of the
    edge ``(i, parent[i])``; ``verts`` maps local to global vertex ids.
    """

    __slots__ = ("verts", "parent", "edge", "req", "_adj")

    def __init__(self, verts, parent, edge, req):
        self.verts = verts
        self.parent = parent
        self.edge = edge
        self.req = req
        self._adj = None

    def __len__(self):
        return len(self.verts)

    def adjacency(self):
        """Per local vertex: list of ``(neighbour, edge id, goes_up)``."""
        if self._adj is None:
            adj = [[] for _ in range(len(self.verts))]
            parent = self.parent.tolist()
            edge = self.edge.tolist()
            for i in range(1, len(parent)):
                p = parent[i]
                adj[i].append((p, edge[i], True))
                adj[p].append((i, edge[i], False))
            self._adj = adj
        return self._adj


@dataclass(frozen=True)
class ContractedTree:
    """Clusters collapsed to representatives, interleaved with cut vertices.

    ``vertex[i]`` is the cut vertex of node ``i`` or -1 for a representative;
    ``cluster[i]`` is the cluster index of a representative (-1 for cuts).
    """

    parent: np.ndarray
    vertex: np.ndarray
    cluster: np.ndarray
    root: int

    def __len__(self):
        return len(self.parent)

    def edges(self):
        return [(i, int(p)) for i, p in enumerate(self.parent) if p >= 0]


def _contract(parent, cut, comp, ncomp):
    """Local contracted tree: nodes ``0..ncomp-1`` are representatives, then
    one node per cut vertex in increasing local order."""
    cut_idx = np.flatnonzero(cut)
    ct_of_cut = np.full(len(parent), -1, dtype=np.int64)
    ct_of_cut[cut_idx] = ncomp + np.arange(len(cut_idx))
    size = ncomp + len(cut_idx)
    ct_parent = np.full(size, -1, dtype=np.int64)
    # a representative hangs from the cut vertex above its cluster's top,
    # which is the cluster's smallest local index
    nz = np.flatnonzero(comp >= 0)
    tops = np.full(ncomp, len(parent), dtype=np.int64)
    np.minimum.at(tops, comp[nz], nz)
    for c in range(ncomp):
        t = tops[c]
        if t > 0:
            ct_parent[c] = ct_of_cut[parent[t]]
    for c in cut_idx:
        if c > 0:
            p = parent[c]
            ct_parent[ct_of_cut[c]] = ct_of_cut[p] if cut[p] else comp[p]
    root = comp[0] if not cut[0] else ct_of_cut[0]
    return ct_parent, ct_of_cut, cut_idx, tops, int(root)


def augment_composite(tree: WeightedTree, rt: int, cut_vertices) -> ContractedTree:
    """Contracted tree of ``tree`` (hung at ``rt``) around ``cut_vertices``.

    Rooted at the node holding ``rt``, which is the node of minimum depth.
    """
    t = tree.rerooted(rt)
    order = t.order
    pos = np.empty(t.n, dtype=np.int64)
    pos[order] = np.arange(t.n)
    lp = np.where(t.parent[order] >= 0, pos[np.maximum(t.parent[order], 0)], -1)
    cut = np.zeros(t.n, dtype=bool)
    for v in cut_vertices:
        cut[pos[int(v)]] = True
    comp, ncomp = label_components(lp, cut)
    ct_parent, ct_of_cut, cut_idx, _, root = _contract(lp, cut, comp, ncomp)
    vertex = np.full(len(ct_parent), -1, dtype=np.int64)
    vertex[ct_of_cut[cut_idx]] = order[cut_idx]
    cluster = np.full(len(ct_parent), -1, dtype=np.int64)
    cluster[:ncomp] = np.arange(ncomp)
    return ContractedTree(ct_parent, vertex, cluster, root)


class HopSpanner:
    """Edges of the spanner; each weighs the exact tree distance of its ends."""

    def __init__(self, n, edges, weights):
        self.n = n
        self.edges = edges          # (m, 2) int64, rows sorted with a < b
        self.weights = weights
        self.keys = edges[:, 0] * n + edges[:, 1]
        self.annotations = {}

    def __len__(self):
        return len(self.edges)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}

    def has_edge(self, a, b) -> bool:
        if a > b:
            a, b = b, a
        return (a, b) in self.edge_index

    def weight(self, a, b):
        if a > b:
            a, b = b, a
        return self.weights[self.edge_index[(a, b)]].item()

    @cached_property
    def adjacency(self):
        adj = [[] for _ in range(self.n)]
        for a, b in self.edges.tolist():
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)


class RecursionTree:
    """Navigation structure recorded while building the spanner.

    Node arrays cover the main recursion tree and every nested structure
    reached through ``next`` pointers; each of those is its own tree in the
    same forest. Contracted trees of all composite nodes likewise share one
    forest (``ct_*`` arrays).
    """

    def __init__(self, builder, tree, spanner, k, root):
        b = builder
        self.tree = tree
        self.spanner = spanner
        self.k = k
        self.root = root
        self.kind = np.asarray(b.kind, dtype=np.int64)
        self.parent = np.asarray(b.node_parent, dtype=np.int64)
        self.vertex = np.asarray(b.node_vertex, dtype=np.int64)
        self.next = np.asarray(b.node_next, dtype=np.int64)
        self.rep = np.asarray(b.node_rep, dtype=np.int64)
        self.node_k = np.asarray(b.node_k, dtype=np.int64)
        self.ct_base = np.asarray(b.node_ct, dtype=np.int64)
        self.index = TreeIndex(self.parent)
        self.level = self.index.depth
        self.tree_root = _forest_roots(self.parent, self.index.depth)
        self.ct_parent = np.asarray(b.ct_parent, dtype=np.int64)
        self.ct_vertex = np.asarray(b.ct_vertex, dtype=np.int64)
        self.ct_cluster = np.asarray(b.ct_cluster, dtype=np.int64)
        self.ct_next_node = np.asarray(b.ct_next_node, dtype=np.int64)
        self.ct_next_ct = np.asarray(b.ct_next_ct, dtype=np.int64)
        self.ct_size = np.asarray(b.node_ct_size, dtype=np.int64)
        self.ct_index = TreeIndex(self.ct_parent)
        self.eta_node = b.eta_node
        self.eta_ct = b.eta_ct
        self.base_off = np.asarray(b.base_off, dtype=np.int64)
        self.base_cnt = np.asarray(b.base_cnt, dtype=np.int64)
        self.base_verts = np.asarray(b.base_verts, dtype=np.int64)
        self.base_adj_off = np.asarray(b.base_adj_off, dtype=np.int64)
        self.base_adj = np.asarray(b.base_adj, dtype=np.bool_)
        # bookkeeping replayed by pathquery.annotate
        self.instances = b.instances
        self.groups = b.groups
        self.chains = b.chains
        self.k2_roots = b.k2_roots
        self.base_group = b.base_group
        self.max_base = max(b.base_cnt) if b.base_cnt else 1

    def __len__(self):
        return len(self.kind)

    @property
    def n(self):
        return self.tree.n

    def eta(self, v: int) -> int:
        """Node of the main recursion tree holding vertex ``v``."""
        return int(self.eta_node[v])

    def children(self, node):
        return [int(c) for c in np.flatnonzero(self.parent == node)]

    def depth(self) -> int:
        main = self.tree_root == self.root
        return int(self.level[main].max()) if main.any() else 0

    def lca_node(self, a: int, b: int) -> int:
        if self.tree_root[a] != self.tree_root[b]:
            raise ValueError("nodes belong to different recursion trees")
        return self.index.lca(a, b)

    def level_ancestor(self, a: int, level: int) -> int:
        return self.index.level_ancestor(a, level)

    def base_vertices(self, node):
        o = self.base_off[node]
        return [int(x) for x in self.base_verts[o:o + self.base_cnt[node]]]

    def contracted_tree(self, node) -> ContractedTree:
        if self.kind[node] != COMPOSITE:
            raise ValueError("only composite nodes carry a contracted tree")
        lo = self.ct_base[node]
        hi = lo + self.ct_size[node]
        par = self.ct_parent[lo:hi].copy()
        par[par >= 0] -= lo
        root = int(np.flatnonzero(par < 0)[0])
        return ContractedTree(par, self.ct_vertex[lo:hi].copy(),
                              self.ct_cluster[lo:hi].copy(), root)

    @cached_property
    def kernel_arrays(self):
        """Everything the query kernel reads, as one tuple."""
        ix, cx = self.index, self.ct_index
        return (
            self.kind, self.vertex, self.next, self.rep,
            ix.depth, ix.euler, ix.first, ix.sparse, ix.logt,
            ix.jump, ix.ladder, ix.lad_start, ix.lad_pos,
            self.ct_parent, self.ct_vertex, self.ct_next_node, self.ct_next_ct,
            cx.depth, cx.euler, cx.first, cx.sparse, cx.logt,
            cx.jump, cx.ladder, cx.lad_start, cx.lad_pos,
            self.eta_node, self.eta_ct,
            self.base_off, self.base_cnt, self.base_verts, self.base_adj_off, self.base_adj,
            self.tree_root,
        )


def _forest_roots(parent, depth):
    root = np.arange(len(parent), dtype=np.int64)
    for v in np.argsort(depth, kind="stable"):
        if parent[v] >= 0:
            root[v] = root[parent[v]]
    return root


class _Builder:
    def __init__(self, n, check=True):
        self.n = n
        self.check = check
        self.kind, self.node_parent, self.node_vertex = [], [], []
        self.node_next, self.node_rep, self.node_k = [], [], []
        self.node_ct, self.node_ct_size = [], []
        self.ct_parent, self.ct_vertex, self.ct_cluster = [], [], []
        self.ct_next_node, self.ct_next_ct = [], []
        self.base_off, self.base_cnt, self.base_verts = [], [], []
        self.base_adj_off, self.base_adj = [], []
        self.edges = set()
        self.chains = []
        self.groups = []
        self.instances = []
        self.k2_roots = []
        self.eta_node = np.full(n, -1, dtype=np.int64)
        self.eta_ct = np.full(n, -1, dtype=np.int64)
        self.comp_cache = {}
        self.base_group = {}

    # -- nodes ---------------------------------------------------------------

    def _node(self, kind, k, vertex=-1):
        self.kind.append(kind)
        self.node_parent.append(-1)
        self.node_vertex.append(vertex)
        self.node_next.append(-1)
        self.node_rep.append(-1)
        self.node_k.append(k)
        self.node_ct.append(-1)
        self.node_ct_size.append(0)
        self.base_off.append(0)
        self.base_cnt.append(0)
        self.base_adj_off.append(0)
        return len(self.kind) - 1

    def _add_edge(self, a, b):
        if a != b:
            self.edges.add((a, b) if a < b else (b, a))

    def _register(self, inst):
        self.instances.append(inst)
        return len(self.instances) - 1

    # -- instance surgery ----------------------------------------------------

    def _prune(self, inst, req):
        keep, new_parent = prune_kernel(inst.parent, req)
        parent = inst.parent
        edge = inst.edge
        new_edge = np.full(len(keep), -1, dtype=np.int64)
        for j in range(1, len(keep)):
            x = int(keep[j])
            stop = int(keep[new_parent[j]])
            if parent[x] == stop:
                new_edge[j] = edge[x]
                continue
            chain = []
            while x != stop:
                chain.append(int(edge[x]))
                x = int(parent[x])
            new_edge[j] = self.n + len(self.chains)
            self.chains.append(chain)
        return _Instance(inst.verts[keep], new_parent, new_edge, req[keep])

    def _split(self, inst, comp, ncomp):
        """Sub-instances, one per component label."""
        idx = np.flatnonzero(comp >= 0)
        labels = comp[idx]
        order = np.argsort(labels, kind="stable")
        idx = idx[order]
        labels = labels[order]
        bounds = np.searchsorted(labels, np.arange(ncomp + 1))
        pos = np.empty(len(inst.verts), dtype=np.int64)
        starts = bounds[labels]
        pos[idx] = np.arange(len(idx)) - starts
        out = []
        for c in range(ncomp):
            sel = idx[bounds[c]:bounds[c + 1]]
            par = inst.parent[sel]
            local = np.where(par >= 0, pos[np.maximum(par, 0)], -1)
            local[0] = -1
            edge = inst.edge[sel].copy()
            edge[0] = -1
            out.append(_Instance(inst.verts[sel], local, edge, inst.req[sel]))
        return out

    # -- recursion -----------------------------------------------------------

    def navigate(self, inst, k, eta_node, eta_ct, k2_root=False):
        if not inst.req.all():
            inst = self._prune(inst, inst.req)
        if k2_root:
            g0, c0 = len(self.groups), len(self.chains)
        n = int(inst.req.sum())
        if n <= k + 1:
            node = self._base(inst, k, eta_node, eta_ct)
        elif k == 2:
            node = self._regular(inst, n, eta_node, eta_ct)
        else:
            node = self._composite(inst, n, k, eta_node, eta_ct)
        if k2_root:
            self.k2_roots.append((node, inst, g0, len(self.groups), c0, len(self.chains)))
        return node

    def _base(self, inst, k, eta_node, eta_ct):
        node = self._node(BASE, k)
        m = len(inst)
        verts = inst.verts.tolist()
        parent = inst.parent
        special = None
        if int(inst.req.sum()) == k + 1:
            kids = np.flatnonzero(parent == 0)
            if len(kids) == 2:
                special = (int(kids[0]), int(kids[1]))
        adj = np.zeros((m, m), dtype=bool)
        for i in range(1, m):
            p = parent[i]
            adj[i, p] = adj[p, i] = True
            self._add_edge(verts[i], verts[p])
        if special is not None:
            a, b = special
            adj[a, b] = adj[b, a] = True
            self._add_edge(verts[a], verts[b])
        self.base_off[node] = len(self.base_verts)
        self.base_cnt[node] = m
        self.base_verts.extend(verts)
        self.base_adj_off[node] = len(self.base_adj)
        self.base_adj.extend(adj.ravel().tolist())
        for v in verts:
            eta_node[v] = node
            eta_ct[v] = -1
        self.base_group[node] = len(self.groups)
        self.groups.append(("base", self._register(inst), special))
        return node

    def _regular(self, inst, n, eta_node, eta_ct):
        c = int(required_centroid(inst.parent, inst.req, inst.verts))
        cut = np.zeros(len(inst), dtype=bool)
        cut[c] = True
        comp, ncomp = label_components(inst.parent, cut)
        subs = self._split(inst, comp, ncomp)
        kids = [self.navigate(s, 2, eta_node, eta_ct) for s in subs if s.req.any()]
        center = int(inst.verts[c])
        node = self._node(REGULAR, 2, center)
        for r in kids:
            self.node_parent[r] = node
        eta_node[center] = node
        eta_ct[center] = -1
        for v in inst.verts[inst.req].tolist():
            self._add_edge(center, v)
        self.groups.append(("star", self._register(inst), c))
        return node

    def _composite(self, inst, n, k, eta_node, eta_ct):
        ell = alpha_prime(k - 2, n)
        if 2 * ell >= n:
            cut = np.zeros(len(inst), dtype=bool)
            cut[required_centroid(inst.parent, inst.req, inst.verts)] = True
        else:
            cut = decompose_greedy(inst.parent, inst.req, ell)
        if self.check and int(cut.sum()) > len(inst) // (ell + 1):
            raise AssertionError("decomposition produced too many cut vertices")
        comp, ncomp = label_components(inst.parent, cut)
        subs = self._split(inst, comp, ncomp)
        ct_parent, ct_of_cut, cut_idx, tops, ct_root = _contract(inst.parent, cut, comp, ncomp)

        kid_roots = [
            self.navigate(s, k, eta_node, eta_ct) if s.req.any() else -1 for s in subs
        ]
        node = self._node(COMPOSITE, k)
        base = len(self.ct_parent)
        self.node_ct[node] = base
        self.node_ct_size[node] = len(ct_parent)
        self.ct_parent.extend((np.where(ct_parent >= 0, ct_parent + base, -1)).tolist())
        verts = inst.verts
        ct_vertex = [-1] * ncomp + verts[cut_idx].tolist()
        self.ct_vertex.extend(ct_vertex)
        self.ct_cluster.extend(list(range(ncomp)) + [-1] * len(cut_idx))
        self.ct_next_node.extend([-1] * len(ct_parent))
        self.ct_next_ct.extend([-1] * len(ct_parent))
        for c, r in enumerate(kid_roots):
            if r >= 0:
                self.node_parent[r] = node
                self.node_rep[r] = base + c
        for c in cut_idx.tolist():
            v = int(verts[c])
            eta_node[v] = node
            eta_ct[v] = base + int(ct_of_cut[c])

        # cut vertex <-> required vertices of every cluster it borders
        inst_id = self._register(inst)
        parent = inst.parent
        cut_list = cut_idx.tolist()
        borders = [[] for _ in range(ncomp)]
        for c in range(ncomp):
            t = int(tops[c])
            if t > 0:
                borders[c].append((int(parent[t]), t))
        for c in cut_list:
            p = int(parent[c]) if c > 0 else -1
            if p >= 0 and not cut[p]:
                borders[comp[p]].append((c, p))
        for c in range(ncomp):
            members = subs[c].verts[subs[c].req].tolist()
            for u, entry in borders[c]:
                gu = int(verts[u])
                for v in members:
                    self._add_edge(gu, v)
                self.groups.append(("border", inst_id, u, entry))
        self.comp_cache[inst_id] = comp

        cut_verts = verts[cut_idx].tolist()
        if k == 3:
            for i, a in enumerate(cut_verts):
                for b in cut_verts[i + 1:]:
                    self._add_edge(a, b)
            pruned = self._prune(inst, cut)
            self.groups.append(("clique", self._register(pruned)))
        else:
            sub = _Instance(inst.verts, inst.parent, inst.edge, cut)
            nxt_node = {}
            nxt_ct = {}
            nr = self.navigate(sub, k - 2, nxt_node, nxt_ct, k2_root=(k - 2 == 2))
            self.node_next[node] = nr
            for c in cut_list:
                v = int(verts[c])
                slot = base + int(ct_of_cut[c])
                self.ct_next_node[slot] = nxt_node[v]
                self.ct_next_ct[slot] = nxt_ct.get(v, -1)
        return node


def _check_k(k):
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ValueError(f"hop parameter k must be an integer >= 2, got {k!r}")


def _top_instance(tree, rt, mask):
    t = tree.rerooted(rt)
    order = t.order
    n = tree.n
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    tp = t.parent[order]
    lp = np.where(tp >= 0, pos[np.maximum(tp, 0)], -1)
    # registry id of a tree edge is its child in the tree's own rooting
    edge = np.full(n, -1, dtype=np.int64)
    for i in range(1, n):
        v = int(order[i])
        p = int(tp[i])
        edge[i] = v if tree.parent[v] == p else p
    return _Instance(order.astype(np.int64), lp, edge, mask[order])


def build(tree: WeightedTree, rt: int | None = None, R=None, k: int = 2, *, check=True):
    """Build the k-hop 1-spanner and its recursion tree.

    ``R`` defaults to the tree's required set; ``rt`` to its root.
    Returns ``(HopSpanner, RecursionTree)``.
    """
    _check_k(k)
    rt = tree.root if rt is None else int(rt)
    tree.check_vertex(rt)
    mask = _required_mask(tree, R)
    inst = _top_instance(tree, rt, mask)
    b = _Builder(tree.n, check)
    root = b.navigate(inst, int(k), b.eta_node, b.eta_ct, k2_root=(k == 2))
    return _finish(b, tree, int(k), root)


def handle_base_case(tree: WeightedTree, rt: int | None = None, R=None, k: int = 2):
    """Base instance: the tree itself, plus a shortcut between the two children
    of the root when there are exactly ``k + 1`` required vertices."""
    _check_k(k)
    rt = tree.root if rt is None else int(rt)
    mask = _required_mask(tree, R)
    if int(mask.sum()) > k + 1:
        raise RuntimeError("handle_base_case called with more than k + 1 required vertices")
    inst = _top_instance(tree, rt, mask)
    b = _Builder(tree.n)
    if not inst.req.all():
        inst = b._prune(inst, inst.req)
    root = b._base(inst, int(k), b.eta_node, b.eta_ct)
    if k == 2:
        b.k2_roots.append((root, inst, 0, len(b.groups), 0, len(b.chains)))
    return _finish(b, tree, int(k), root)


def _required_mask(tree, R):
    if R is None:
        mask = tree.required.copy()
    else:
        mask = np.zeros(tree.n, dtype=bool)
        for v in R:
            tree.check_vertex(int(v))
            mask[int(v)] = True
    if not mask.any():
        raise ValueError("the required set must be non-empty")
    return mask


def _finish(b, tree, k, root):
    n = tree.n
    if b.edges:
        edges = np.array(sorted(b.edges), dtype=np.int64)
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
    weights = _edge_weights(tree, edges)
    spanner = HopSpanner(n, edges, weights)
    rtree = RecursionTree(b, tree, spanner, k, root)
    rtree.comp_cache = b.comp_cache
    return spanner, rtree


def _edge_weights(tree, edges):
    if len(edges) == 0:
        return np.zeros(0, dtype=tree.weight.dtype)
    ix = TreeIndex(tree.parent)
    return _weights_kernel(edges, tree.root_distance, *ix.lca_arrays)


@njit
def _weights_kernel(edges, dist, depth, euler, first, sparse, logt):
    out = np.empty(edges.shape[0], dtype=dist.dtype)
    for i in range(edges.shape[0]):
        a = edges[i, 0]
        b = edges[i, 1]
        c = lca_query(depth, euler, first, sparse, logt, a, b)
        out[i] = dist[a] + dist[b] - 2 * dist[c]
    return out
