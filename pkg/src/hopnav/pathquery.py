"""Path queries on a k-hop spanner and semigroup products along them.

``find_path`` walks down the recursion tree from the lowest common node of
the two endpoints: a regular node answers with its centroid, a composite node
steps to the cut vertices x, y that separate u from v and, for k >= 4,
continues with x, y inside the nested (k-2) structure. At most k edges come
out, in order, all lying on the tree path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .hopspanner import BASE, REGULAR, RecursionTree
from .treeindex import la_query, lca_query

# info slots filled by the kernel
INFO_CALLS, INFO_SEG_START, INFO_SEG_END, INFO_ROOT, INFO_K, INFO_NODE = range(6)


@njit
def _push(out, nf, x):
    if nf == 0 or out[nf - 1] != x:
        out[nf] = x
        nf += 1
    return nf


@njit
def _base_bfs(nav, node, u, v, queue, prev, path):
    """Fewest-hop path between u and v inside a base node; writes it to
    ``path`` and returns its length."""
    base_off = nav[28]
    base_cnt = nav[29]
    base_verts = nav[30]
    adj_off = nav[31]
    adj = nav[32]
    off = base_off[node]
    m = base_cnt[node]
    aoff = adj_off[node]
    lu = -1
    lv = -1
    for i in range(m):
        w = base_verts[off + i]
        if w == u:
            lu = i
        if w == v:
            lv = i
    for i in range(m):
        prev[i] = -2
    prev[lu] = -1
    queue[0] = lu
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        if x == lv:
            break
        for y in range(m):
            if adj[aoff + x * m + y] and prev[y] == -2:
                prev[y] = x
                queue[tail] = y
                tail += 1
    cnt = 0
    x = lv
    while x >= 0:
        queue[cnt] = x
        cnt += 1
        x = prev[x]
    for i in range(cnt):
        path[i] = base_verts[off + queue[cnt - 1 - i]]
    return cnt


@njit
def find_path_kernel(nav, u, v, k, out, back, queue, prev, middle, info):
    """Writes the path u -> v into ``out`` and returns its length.

    ``info`` receives the number of recursive invocations, the index range
    of the innermost segment, the root of the recursion tree it came from and
    the hop parameter and node used there.
    """
    kind = nav[0]
    vertex = nav[1]
    rep = nav[3]
    depth = nav[4]
    euler = nav[5]
    first = nav[6]
    sparse = nav[7]
    logt = nav[8]
    jump = nav[9]
    ladder = nav[10]
    lad_start = nav[11]
    lad_pos = nav[12]
    ct_parent = nav[13]
    ct_vertex = nav[14]
    ct_next_node = nav[15]
    ct_next_ct = nav[16]
    cdepth = nav[17]
    ceuler = nav[18]
    cfirst = nav[19]
    csparse = nav[20]
    clogt = nav[21]
    cjump = nav[22]
    cladder = nav[23]
    clad_start = nav[24]
    clad_pos = nav[25]
    eta_node = nav[26]
    eta_ct = nav[27]
    tree_root = nav[33]

    nf = 0
    nb = 0
    calls = 0
    au = eta_node[u]
    av = eta_node[v]
    cu = eta_ct[u]
    cv = eta_ct[v]
    nm = 0
    root = au
    last = au
    while True:
        calls += 1
        root = tree_root[au]
        last = au
        if u == v:
            middle[0] = u
            nm = 1
            break
        if au == av and kind[au] == BASE:
            nm = _base_bfs(nav, au, u, v, queue, prev, middle)
            break
        beta = au if au == av else lca_query(depth, euler, first, sparse, logt, au, av)
        last = beta
        if kind[beta] == REGULAR:
            middle[0] = u
            middle[1] = vertex[beta]
            middle[2] = v
            nm = 3
            break
        lvl = depth[beta] + 1
        if au == beta:
            a = cu
        else:
            a = rep[la_query(depth, jump, ladder, lad_start, lad_pos, au, lvl)]
        if av == beta:
            b = cv
        else:
            b = rep[la_query(depth, jump, ladder, lad_start, lad_pos, av, lvl)]
        # the cut vertex next to a on the contracted path towards b, and back
        if ct_vertex[a] >= 0:
            xn = a
        else:
            z = lca_query(cdepth, ceuler, cfirst, csparse, clogt, a, b)
            if z != a:
                xn = ct_parent[a]
            else:
                xn = la_query(cdepth, cjump, cladder, clad_start, clad_pos, b, cdepth[a] + 1)
        if ct_vertex[b] >= 0:
            yn = b
        else:
            z = lca_query(cdepth, ceuler, cfirst, csparse, clogt, a, b)
            if z != b:
                yn = ct_parent[b]
            else:
                yn = la_query(cdepth, cjump, cladder, clad_start, clad_pos, a, cdepth[b] + 1)
        x = ct_vertex[xn]
        y = ct_vertex[yn]
        if k == 3:
            middle[0] = u
            middle[1] = x
            middle[2] = y
            middle[3] = v
            nm = 4
            break
        nf = _push(out, nf, u)
        back[nb] = v
        nb += 1
        u = x
        v = y
        au = ct_next_node[xn]
        cu = ct_next_ct[xn]
        av = ct_next_node[yn]
        cv = ct_next_ct[yn]
        k -= 2

    seg_start = nf
    if nf > 0 and out[nf - 1] == middle[0]:
        seg_start = nf - 1
    for i in range(nm):
        nf = _push(out, nf, middle[i])
    seg_end = nf - 1
    for i in range(nb - 1, -1, -1):
        nf = _push(out, nf, back[i])
    info[0] = calls
    info[1] = seg_start
    info[2] = seg_end
    info[3] = root
    info[4] = k
    info[5] = last
    return nf


@njit
def _scratch(max_base, k):
    size = max(max_base, k + 2) + 2
    return (np.empty(k + 2, dtype=np.int64), np.empty(k + 2, dtype=np.int64),
            np.empty(size, dtype=np.int64), np.empty(size, dtype=np.int64),
            np.empty(size, dtype=np.int64), np.empty(6, dtype=np.int64))


@njit
def batch_find_paths(nav, us, vs, k, max_base):
    """Paths for many pairs: ``(paths padded with -1, lengths, invocations)``."""
    q = us.shape[0]
    paths = np.full((q, k + 1), -1, dtype=np.int64)
    lens = np.zeros(q, dtype=np.int64)
    calls = np.zeros(q, dtype=np.int64)
    out, back, queue, prev, middle, info = _scratch(max_base, k)
    buf = np.empty(max(max_base, k + 2) * 2 + 2 * k + 4, dtype=np.int64)
    for i in range(q):
        m = find_path_kernel(nav, us[i], vs[i], k, buf, back, queue, prev, middle, info)
        lens[i] = m
        calls[i] = info[0]
        for j in range(min(m, k + 1)):
            paths[i, j] = buf[j]
    return paths, lens, calls


@njit
def check_all_pairs(nav, k, verts, dist, keys, weights, n, max_base):
    """Exhaustive audit over ordered pairs of ``verts``.

    Returns counts ``[pairs, too_many_hops, missing_edge, wrong_weight,
    not_monotone, too_deep, max_hops]``.
    """
    stats = np.zeros(7, dtype=np.int64)
    out, back, queue, prev, middle, info = _scratch(max_base, k)
    buf = np.empty(max(max_base, k + 2) * 2 + 2 * k + 4, dtype=np.int64)
    for ia in range(verts.shape[0]):
        u = verts[ia]
        for ib in range(verts.shape[0]):
            w = verts[ib]
            if u == w:
                continue
            stats[0] += 1
            m = find_path_kernel(nav, u, w, k, buf, back, queue, prev, middle, info)
            hops = m - 1
            if hops > stats[6]:
                stats[6] = hops
            if hops > k:
                stats[1] += 1
            if info[0] > k // 2:
                stats[5] += 1
            if buf[0] != u or buf[m - 1] != w:
                stats[4] += 1
                continue
            total = 0.0
            bad_edge = False
            mono = True
            for j in range(hops):
                a = buf[j]
                b = buf[j + 1]
                if a > b:
                    a, b = b, a
                key = a * n + b
                pos = np.searchsorted(keys, key)
                if pos >= keys.shape[0] or keys[pos] != key:
                    bad_edge = True
                else:
                    total += weights[pos]
                if dist[u, buf[j]] >= dist[u, buf[j + 1]]:
                    mono = False
            for j in range(m):
                p = buf[j]
                if dist[u, p] + dist[p, w] != dist[u, w]:
                    mono = False
            if bad_edge:
                stats[2] += 1
            elif total != dist[u, w]:
                stats[3] += 1
            if not mono:
                stats[4] += 1
    return stats


@dataclass(frozen=True)
class SpannerPath:
    vertices: tuple
    weight: object
    calls: int = 1

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1

    def edges(self):
        return list(zip(self.vertices[:-1], self.vertices[1:]))


def _check_endpoint(D: RecursionTree, v):
    if not (0 <= v < D.n) or D.eta_node[v] < 0:
        raise KeyError(f"vertex {v} is not in the navigated set")


def raw_path(D: RecursionTree, u: int, v: int):
    """``(vertices, info)`` straight from the kernel."""
    _check_endpoint(D, u)
    _check_endpoint(D, v)
    k = D.k
    size = max(D.max_base, k + 2) * 2 + 2 * k + 4
    out = np.empty(size, dtype=np.int64)
    back = np.empty(k + 2, dtype=np.int64)
    queue = np.empty(size, dtype=np.int64)
    prev = np.empty(size, dtype=np.int64)
    middle = np.empty(size, dtype=np.int64)
    info = np.zeros(6, dtype=np.int64)
    m = find_path_kernel(D.kernel_arrays, int(u), int(v), int(k), out, back, queue, prev,
                         middle, info)
    return [int(x) for x in out[:m]], info


def find_path(D: RecursionTree, u: int, v: int) -> SpannerPath:
    """Path of at most k spanner edges from u to v whose weight is the tree
    distance between them."""
    verts, info = raw_path(D, u, v)
    sp = D.spanner
    w = sum((sp.weight(a, b) for a, b in zip(verts[:-1], verts[1:])), sp.weights.dtype.type(0))
    return SpannerPath(tuple(verts), w.item() if hasattr(w, "item") else w, int(info[0]))


# -- semigroup annotations ---------------------------------------------------


class Annotation:
    """Per spanner edge (a, b), a < b: the tree-path product a -> b and b -> a."""

    def __init__(self, op, identity=None):
        self.op = op
        self.identity = identity
        self.values = {}

    def directed(self, a, b):
        if a < b:
            return self.values[(a, b)][0]
        return self.values[(b, a)][1]

    def __len__(self):
        return len(self.values)


def _edge_value_table(D: RecursionTree, values):
    """Registry value per base tree edge id (the child in the tree's rooting)."""
    tree = D.tree
    n = tree.n
    table = [None] * n
    if callable(values):
        for c in range(n):
            p = int(tree.parent[c])
            if p >= 0:
                table[c] = values(c, p)
    elif isinstance(values, dict):
        for (a, b), val in values.items():
            if tree.parent[a] == b:
                table[a] = val
            elif tree.parent[b] == a:
                table[b] = val
            else:
                raise ValueError(f"({a}, {b}) is not a tree edge")
    else:
        arr = list(values)
        if len(arr) != n:
            raise ValueError("value array must have one entry per vertex (edge to its parent)")
        for c in range(n):
            if tree.parent[c] >= 0:
                table[c] = arr[c]
    for c in range(n):
        if tree.parent[c] >= 0 and table[c] is None:
            raise ValueError(f"missing value for tree edge ({c}, {int(tree.parent[c])})")
    return table


def _fold_chains(D, base, op, lo=0, hi=None, up=None, down=None):
    n = D.n
    hi = len(D.chains) if hi is None else hi
    up = {} if up is None else up
    down = {} if down is None else down

    def get(i, upward):
        if i < n:
            return base[i]
        return up[i] if upward else down[i]

    for j in range(lo, hi):
        chain = D.chains[j]
        acc = get(chain[0], True)
        for e in chain[1:]:
            acc = op(acc, get(e, True))
        up[n + j] = acc
        acc = get(chain[-1], False)
        for e in reversed(chain[:-1]):
            acc = op(acc, get(e, False))
        down[n + j] = acc
    return up, down


def _replay_groups(D, glo, ghi, ann, val):
    """Fill ``ann`` for every spanner edge produced by groups glo..ghi.

    ``val(edge_id, upward)`` gives the registry value of an edge in the
    requested direction.
    """
    op = ann.op
    store = ann.values

    def record(ga, gb, fwd, bwd):
        if ga < gb:
            store[(ga, gb)] = (fwd, bwd)
        else:
            store[(gb, ga)] = (bwd, fwd)

    def sweep(inst, s, first=None, allowed=None, targets=None):
        adj = inst.adjacency()
        verts = inst.verts
        req = inst.req if targets is None else targets
        gs = int(verts[s])
        stack = []
        if first is None:
            for y, e, upw in adj[s]:
                if allowed is None or allowed[y]:
                    stack.append((y, s, val(e, upw), val(e, not upw)))
        else:
            y = first
            for z, e, upw in adj[s]:
                if z == y:
                    stack.append((y, s, val(e, upw), val(e, not upw)))
        while stack:
            x, px, fwd, bwd = stack.pop()
            if req[x]:
                record(gs, int(verts[x]), fwd, bwd)
            for y, e, upw in adj[x]:
                if y == px or (allowed is not None and not allowed[y]):
                    continue
                stack.append((y, x, op(fwd, val(e, upw)), op(val(e, not upw), bwd)))

    for g in D.groups[glo:ghi]:
        tag = g[0]
        inst = D.instances[g[1]]
        if tag == "star":
            sweep(inst, g[2])
        elif tag == "border":
            comp = D.comp_cache[g[1]]
            allowed = comp == comp[g[3]]
            sweep(inst, g[2], first=g[3], allowed=allowed)
        elif tag == "clique":
            for s in np.flatnonzero(inst.req).tolist():
                sweep(inst, s)
        else:  # base
            verts = inst.verts
            for i in range(1, len(verts)):
                e = int(inst.edge[i])
                p = int(inst.parent[i])
                record(int(verts[i]), int(verts[p]), val(e, True), val(e, False))
            if g[2] is not None:
                a, b = g[2]
                ea, eb = int(inst.edge[a]), int(inst.edge[b])
                record(int(verts[a]), int(verts[b]),
                       op(val(ea, True), val(eb, False)), op(val(eb, True), val(ea, False)))


def annotate(D: RecursionTree, values, op, identity=None) -> Annotation:
    """Label every spanner edge with the semigroup product of the tree path it
    spans, in both directions.

    ``values`` is a dict keyed by tree edges, a callable ``(child, parent)``,
    or a per-vertex sequence giving the value of the edge to the parent.
    ``op`` must be associative.
    """
    base = _edge_value_table(D, values)
    up, down = _fold_chains(D, base, op)
    n = D.n

    def val(e, upward):
        if e < n:
            return base[e]
        return up[e] if upward else down[e]

    ann = Annotation(op, identity)
    _replay_groups(D, 0, len(D.groups), ann, val)
    return ann


def product_query(D: RecursionTree, ann: Annotation, u: int, v: int, counter=None):
    """Product of the edge values along the tree path u -> v.

    Uses at most k - 1 applications of the operation; ``counter`` (a one-item
    list) is incremented per application. For u == v the annotation's
    identity is returned, and a ValueError raised if there is none.
    """
    if u == v:
        _check_endpoint(D, u)
        if ann.identity is None:
            raise ValueError("empty product: the semigroup has no identity")
        return ann.identity
    verts, _ = raw_path(D, u, v)
    acc = ann.directed(verts[0], verts[1])
    for a, b in zip(verts[1:-1], verts[2:]):
        acc = ann.op(acc, ann.directed(a, b))
        if counter is not None:
            counter[0] += 1
    return acc
