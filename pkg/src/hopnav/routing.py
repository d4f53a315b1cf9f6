"""Two-hop routing on tree metrics under the fixed-port model.

Each vertex stores, for every regular ancestor of its recursion-tree node, the
port towards that node's centroid (its table) and the port from that centroid
towards itself (its address). Routing to v: find the deepest ancestor shared
with v's address by binary search, go to its centroid, and let the centroid
use the port written in the header. Vertices sharing a base node route by a
small local table instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .hopspanner import BASE, REGULAR, build
from .pathquery import raw_path
from .treemetric import WeightedTree

DELIVER = 0
DROP = -1


class PortedGraph:
    """Spanner adjacency with a port permutation 1..deg at every vertex."""

    def __init__(self, n, edges, weights, rng):
        self.n = n
        deg = np.bincount(edges.ravel(), minlength=n) if len(edges) else np.zeros(n, np.int64)
        self.start = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=self.start[1:])
        m2 = int(self.start[-1])
        self.nbr = np.empty(m2, dtype=np.int64)
        self.wt = np.empty(m2, dtype=weights.dtype if len(weights) else np.int64)
        fill = self.start[:-1].copy()
        for (a, b), w in zip(edges.tolist(), weights.tolist()):
            self.nbr[fill[a]] = b
            self.wt[fill[a]] = w
            fill[a] += 1
            self.nbr[fill[b]] = a
            self.wt[fill[b]] = w
            fill[b] += 1
        # slot_of_port[start[x] + p - 1] is the slot reached through port p
        self.port = np.empty(m2, dtype=np.int64)
        self.slot_of_port = np.empty(m2, dtype=np.int64)
        for x in range(n):
            lo, hi = int(self.start[x]), int(self.start[x + 1])
            perm = rng.permutation(hi - lo)
            self.port[lo:hi] = perm + 1
            self.slot_of_port[lo + perm] = np.arange(lo, hi)
        self._lookup = {}
        for x in range(n):
            for s in range(self.start[x], self.start[x + 1]):
                self._lookup[(x, int(self.nbr[s]))] = int(self.port[s])

    def degree(self, x):
        return int(self.start[x + 1] - self.start[x])

    def port_of(self, x, y) -> int:
        return self._lookup[(x, y)]

    def neighbor(self, x, p) -> int:
        if not 1 <= p <= self.degree(x):
            raise ValueError(f"vertex {x} has no port {p}")
        return int(self.nbr[self.slot_of_port[self.start[x] + p - 1]])

    def check_ports(self):
        for x in range(self.n):
            lo, hi = self.start[x], self.start[x + 1]
            if sorted(self.port[lo:hi].tolist()) != list(range(1, hi - lo + 1)):
                return False
        return True


@dataclass(frozen=True)
class RoutingTable:
    """What a vertex knows: its id, ancestor nodes with ports towards their
    centroids (0 where it is the centroid), and the base-node table."""

    vertex: int
    nodes: np.ndarray
    ports: np.ndarray
    q_vertices: np.ndarray
    q_ports: np.ndarray

    @property
    def entries(self):
        return len(self.nodes) + len(self.q_vertices)


@dataclass(frozen=True)
class Header:
    """Destination id and address (ancestor nodes with ports from their
    centroids towards it), plus the tree index for cover routing."""

    dest: int
    nodes: np.ndarray
    ports: np.ndarray
    tree: int = 0


@dataclass(frozen=True)
class RouteTrace:
    vertices: tuple
    weight: object
    comparisons: int = 0

    @property
    def hops(self):
        return len(self.vertices) - 1


@njit
def _decide(me, nodes, ports, qv, qp, dest, hnodes, hports, counter):
    """Port to forward on, DELIVER or DROP. Reads only the local table and
    the header; ``counter[0]`` accumulates entry comparisons."""
    if dest == me:
        return 0
    for i in range(qv.shape[0]):
        if qv[i] == dest:
            return qp[i]
    m = min(nodes.shape[0], hnodes.shape[0])
    counter[0] += 1
    if m == 0 or nodes[0] != hnodes[0]:
        return -1
    # ancestor lists agree exactly on a prefix; find its last index
    lo = 0
    hi = m - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        counter[0] += 1
        if nodes[mid] == hnodes[mid]:
            lo = mid
        else:
            hi = mid - 1
    if ports[lo] != 0:
        return ports[lo]
    if hports[lo] == 0:
        return -1
    return hports[lo]


def decide(table: RoutingTable, header: Header, counter=None):
    c = np.zeros(1, dtype=np.int64)
    p = _decide(table.vertex, table.nodes, table.ports, table.q_vertices, table.q_ports,
                header.dest, header.nodes, header.ports, c)
    if counter is not None:
        counter[0] += int(c[0])
    return int(p)


@njit
def _simulate(pairs, up_off, up_node, up_port, down_port, q_off, q_vert, q_port,
              start, nbr, wt, slot_of_port, max_hops):
    """Route every pair; returns (hops, weight, comparisons at the busiest
    vertex, end vertex). hops = -1 marks a dropped or runaway packet."""
    q = pairs.shape[0]
    hops = np.zeros(q, dtype=np.int64)
    weight = np.zeros(q, dtype=wt.dtype)
    comps = np.zeros(q, dtype=np.int64)
    end = np.zeros(q, dtype=np.int64)
    counter = np.zeros(1, dtype=np.int64)
    for i in range(q):
        u = pairs[i, 0]
        v = pairs[i, 1]
        hn = up_node[up_off[v]:up_off[v + 1]]
        hp = down_port[up_off[v]:up_off[v + 1]]
        x = u
        h = 0
        w = wt.dtype.type(0)
        worst = 0
        while True:
            counter[0] = 0
            p = _decide(x, up_node[up_off[x]:up_off[x + 1]], up_port[up_off[x]:up_off[x + 1]],
                        q_vert[q_off[x]:q_off[x + 1]], q_port[q_off[x]:q_off[x + 1]],
                        v, hn, hp, counter)
            if counter[0] > worst:
                worst = counter[0]
            if p == 0:
                break
            if p < 0 or p > start[x + 1] - start[x] or h >= max_hops:
                h = -1
                break
            s = slot_of_port[start[x] + p - 1]
            w += wt[s]
            x = nbr[s]
            h += 1
        hops[i] = h
        weight[i] = w
        comps[i] = worst
        end[i] = x
    return hops, weight, comps, end


class RoutingScheme:
    """Tables and addresses for every vertex of one tree."""

    def __init__(self, tree: WeightedTree, seed=0, R=None):
        self.tree = tree
        self.spanner, self.D = build(tree, tree.root, R, 2)
        self.graph = PortedGraph(tree.n, self.spanner.edges, self.spanner.weights,
                                 np.random.default_rng(seed))
        self._derive()

    def _derive(self):
        D, g = self.D, self.graph
        n = self.tree.n
        up_off = np.zeros(n + 1, dtype=np.int64)
        up_node, up_port, down_port = [], [], []
        q_off = np.zeros(n + 1, dtype=np.int64)
        q_vert, q_port = [], []
        kind, parent, vertex = D.kind, D.parent, D.vertex
        for u in range(n):
            node = int(D.eta_node[u])
            chain = []
            while node >= 0:
                if kind[node] == REGULAR:
                    chain.append(node)
                node = int(parent[node])
            chain.reverse()
            for b in chain:
                c = int(vertex[b])
                up_node.append(b)
                up_port.append(0 if c == u else g.port_of(u, c))
                down_port.append(0 if c == u else g.port_of(c, u))
            up_off[u + 1] = len(up_node)
            node = int(D.eta_node[u])
            if node >= 0 and kind[node] == BASE:
                for w in D.base_vertices(node):
                    if w != u:
                        path, _ = raw_path(D, u, w)
                        q_vert.append(w)
                        q_port.append(g.port_of(u, path[1]))
            q_off[u + 1] = len(q_vert)
        as_arr = lambda x: np.asarray(x, dtype=np.int64)
        self.up_off, self.up_node, self.up_port = up_off, as_arr(up_node), as_arr(up_port)
        self.down_port = as_arr(down_port)
        self.q_off, self.q_vert, self.q_port = q_off, as_arr(q_vert), as_arr(q_port)

    @property
    def n(self):
        return self.tree.n

    def table(self, u) -> RoutingTable:
        a, b = self.up_off[u], self.up_off[u + 1]
        c, d = self.q_off[u], self.q_off[u + 1]
        return RoutingTable(u, self.up_node[a:b], self.up_port[a:b],
                            self.q_vert[c:d], self.q_port[c:d])

    def address(self, v):
        a, b = self.up_off[v], self.up_off[v + 1]
        return list(zip(self.up_node[a:b].tolist(), self.down_port[a:b].tolist()))

    def header(self, v, tree=0) -> Header:
        a, b = self.up_off[v], self.up_off[v + 1]
        return Header(v, self.up_node[a:b], self.down_port[a:b], tree)

    def entry_counts(self):
        """Per vertex: table entries (ancestors plus base-node entries)."""
        return np.diff(self.up_off) + np.diff(self.q_off)

    def bit_sizes(self):
        """Per vertex: address plus table size with information-theoretic widths."""
        node_bits = max(1, math.ceil(math.log2(max(len(self.D), 2))))
        maxdeg = int(np.diff(self.graph.start).max()) if self.n else 0
        port_bits = max(1, math.ceil(math.log2(maxdeg + 1)))
        vert_bits = max(1, math.ceil(math.log2(max(self.n, 2))))
        anc = np.diff(self.up_off)
        q = np.diff(self.q_off)
        return 2 * anc * (node_bits + port_bits) + q * (vert_bits + port_bits) + vert_bits

    def check_shared_prefix(self, limit=64):
        """Ancestor lists of u and v agree exactly on a prefix (small instances)."""
        n = min(self.n, limit)
        for u in range(n):
            a = self.up_node[self.up_off[u]:self.up_off[u + 1]].tolist()
            for v in range(n):
                b = self.up_node[self.up_off[v]:self.up_off[v + 1]].tolist()
                j = 0
                while j < min(len(a), len(b)) and a[j] == b[j]:
                    j += 1
                if a[j:j + 1] and b[j:j + 1] and set(a[j:]) & set(b[j:]):
                    return False
        return True

    def route(self, u, v) -> RouteTrace:
        """Forward hop by hop; each decision sees only the vertex's table and
        the header."""
        header = self.header(v)
        x = u
        trace = [u]
        weight = self.graph.wt.dtype.type(0) if len(self.graph.wt) else 0
        comparisons = 0
        while True:
            cnt = [0]
            p = decide(self.table(x), header, cnt)
            comparisons = max(comparisons, cnt[0])
            if p == DELIVER:
                break
            if p == DROP or len(trace) > 3:
                raise RuntimeError(f"packet {u}->{v} dropped at {x}")
            y = self.graph.neighbor(x, p)
            weight = weight + self.tree_weight(x, y)
            x = y
            trace.append(x)
        w = weight.item() if hasattr(weight, "item") else weight
        return RouteTrace(tuple(trace), w, comparisons)

    def tree_weight(self, x, y):
        return self.spanner.weight(x, y)

    def simulate(self, pairs, max_hops=2):
        pairs = np.ascontiguousarray(pairs, dtype=np.int64).reshape(-1, 2)
        g = self.graph
        return _simulate(pairs, self.up_off, self.up_node, self.up_port, self.down_port,
                         self.q_off, self.q_vert, self.q_port, g.start, g.nbr, g.wt,
                         g.slot_of_port, max_hops)


def build_routing(T: WeightedTree, seed=0) -> RoutingScheme:
    return RoutingScheme(T, seed)


def route(scheme: RoutingScheme, u, v) -> RouteTrace:
    return scheme.route(u, v)


class CoverRouting:
    """Routing over a Ramsey tree cover: one scheme per tree."""

    def __init__(self, cover, seed=0):
        if cover.ramsey is None:
            raise ValueError("cover routing needs a Ramsey cover")
        self.cover = cover
        npts = len(cover.ramsey)
        self.schemes = [RoutingScheme(t, seed + i, range(npts)) for i, t in enumerate(cover.trees)]

    def route(self, u, v) -> tuple:
        """``(RouteTrace, tree index)``; the source's tree goes into the header."""
        i = int(self.cover.ramsey[u])
        return self.schemes[i].route(u, v), i


def cover_route(cr: CoverRouting, u, v):
    return cr.route(u, v)
