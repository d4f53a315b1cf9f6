"""Independent reference implementations used by the tests.

Nothing here imports the package's algorithms; trees are handled as plain
adjacency dicts and every answer is found by exhaustive search.
"""
from __future__ import annotations

import heapq
import math
from collections import deque

import numpy as np


# -- Ackermann rows, saturating at a cap -------------------------------------------


def row_values(kind, r, cap, smax=None):
    """[f(r, 0), f(r, 1), ...] until the first value >= cap (clipped to cap)."""
    vals = []
    for s in range(cap + 2 if smax is None else smax):
        v = _row(kind, r, s, cap)
        vals.append(v)
        if v >= cap:
            break
    return vals


def _row(kind, r, s, cap):
    if kind == "A":
        if r == 0:
            return min(2 * s, cap)
        v = 1
    else:
        if r == 0:
            return min(s * s, cap)
        v = 2
    for _ in range(s):
        v = _row(kind, r - 1, v, cap)
        if v >= cap:
            return cap
    return v


def alpha_table(k, nmax):
    """alpha_k(n) for every n in 0..nmax by scanning the row once."""
    kind = "A" if k % 2 == 0 else "B"
    vals = row_values(kind, k // 2, nmax + 1)
    n = np.arange(nmax + 1)
    # smallest s with row(s) >= n
    return np.searchsorted(np.asarray(vals), n, side="left")


def alpha_prime_tables(kmax, nmax):
    """alpha'_k(n) for k <= kmax, n <= nmax, by fixpoint iteration of the
    recurrence over whole arrays."""
    out = {}
    for k in range(kmax + 1):
        base = alpha_table(k, nmax)
        if k <= 1:
            out[k] = base
            continue
        inner = out[k - 2]
        ap = base.copy()
        big = np.arange(nmax + 1) > k + 1
        while True:
            nxt = ap.copy()
            nxt[big] = 2 + ap[inner[big]]
            if np.array_equal(nxt, ap):
                break
            ap = nxt
        out[k] = ap
    return out


# -- trees as adjacency dicts ----------------------------------------------------------


def random_parent(n, rng):
    return [-1] + [int(rng.integers(0, i)) for i in range(1, n)]


def adjacency(n, edges):
    adj = {v: {} for v in range(n)}
    for u, v, w in edges:
        adj[u][v] = w
        adj[v][u] = w
    return adj


def tree_path(adj, u, v):
    """Vertex list of the unique u-v path, by BFS."""
    prev = {u: None}
    q = deque([u])
    while q:
        x = q.popleft()
        if x == v:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                q.append(y)
    out = [v]
    while out[-1] != u:
        out.append(prev[out[-1]])
    return out[::-1]


def path_weight(adj, path):
    return sum(adj[a][b] for a, b in zip(path, path[1:]))


def distances(adj):
    n = len(adj)
    d = np.zeros((n, n), dtype=np.float64)
    for s in range(n):
        seen = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            for y, w in adj[x].items():
                if y not in seen:
                    seen[y] = seen[x] + w
                    q.append(y)
        for t, val in seen.items():
            d[s, t] = val
    return d


def is_subsequence(sub, seq):
    it = iter(seq)
    return all(x in it for x in sub)


def components_without(adj, cut):
    seen = set(cut)
    comps = []
    for s in adj:
        if s in seen:
            continue
        comp = []
        seen.add(s)
        q = deque([s])
        while q:
            x = q.popleft()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        comps.append(comp)
    return comps


# -- graphs -------------------------------------------------------------------------------


def dijkstra_all(n, edges):
    adj = [[] for _ in range(n)]
    for (a, b), w in edges.items():
        adj[a].append((b, w))
        adj[b].append((a, w))
    out = np.full((n, n), math.inf)
    for s in range(n):
        out[s, s] = 0
        pq = [(0, s)]
        while pq:
            d, x = heapq.heappop(pq)
            if d > out[s, x]:
                continue
            for y, w in adj[x]:
                if d + w < out[s, y]:
                    out[s, y] = d + w
                    heapq.heappush(pq, (d + w, y))
    return out


def mst_weight(dist):
    """Kruskal over all pairs of a dense matrix."""
    n = dist.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0
    for w, a, b in sorted((dist[a, b], a, b) for a in range(n) for b in range(a + 1, n)):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            total += w
    return total


def is_spanning_tree(n, edges):
    if len(edges) != n - 1:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def matmul_mod(a, b, p=97):
    return ((a[0] * b[0] + a[1] * b[2]) % p, (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p, (a[2] * b[1] + a[3] * b[3]) % p)
