"""Constant-time LCA and level-ancestor queries on a rooted forest.

LCA uses an Euler tour with a sparse table over depths; level ancestors use
jump pointers plus long-path ladders. Both take O(n log n) preprocessing and
answer in O(1).
"""
from __future__ import annotations

import numpy as np

from ._jit import njit


@njit
def _children_csr(parent):
    n = parent.shape[0]
    start = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        if parent[v] >= 0:
            start[parent[v] + 1] += 1
    for i in range(n):
        start[i + 1] += start[i]
    fill = start[:-1].copy()
    kids = np.empty(max(start[n], 1), dtype=np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            kids[fill[p]] = v
            fill[p] += 1
    return start, kids


@njit
def _floor_log2(x):
    r = 0
    while x > 1:
        x >>= 1
        r += 1
    return r


@njit
def build_index(parent):
    n = parent.shape[0]
    start, kids = _children_csr(parent)

    # BFS order over all roots, depths
    order = np.empty(n, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    tail = 0
    for v in range(n):
        if parent[v] < 0:
            order[tail] = v
            tail += 1
    head = 0
    while head < tail:
        x = order[head]
        head += 1
        for j in range(start[x], start[x + 1]):
            y = kids[j]
            depth[y] = depth[x] + 1
            order[tail] = y
            tail += 1

    # Euler tour (iterative DFS)
    m = 2 * n - 1 if n > 0 else 0
    euler = np.empty(max(m + n, 1), dtype=np.int64)
    first = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n + 1, dtype=np.int64)
    cursor = np.zeros(n, dtype=np.int64)
    e = 0
    for r in range(n):
        if parent[r] >= 0:
            continue
        top = 0
        stack[0] = r
        first[r] = e
        euler[e] = r
        e += 1
        cursor[r] = start[r]
        while top >= 0:
            x = stack[top]
            if cursor[x] < start[x + 1]:
                y = kids[cursor[x]]
                cursor[x] += 1
                top += 1
                stack[top] = y
                cursor[y] = start[y]
                first[y] = e
                euler[e] = y
                e += 1
            else:
                top -= 1
                if top >= 0:
                    euler[e] = stack[top]
                    e += 1
    euler = euler[:e]

    levels = _floor_log2(max(e, 1)) + 1
    sparse = np.empty((levels, max(e, 1)), dtype=np.int64)
    for i in range(e):
        sparse[0, i] = euler[i]
    for lv in range(1, levels):
        half = 1 << (lv - 1)
        for i in range(e - (1 << lv) + 1):
            a = sparse[lv - 1, i]
            b = sparse[lv - 1, i + half]
            sparse[lv, i] = a if depth[a] <= depth[b] else b
    logt = np.zeros(e + 2, dtype=np.int64)
    for i in range(2, e + 2):
        logt[i] = logt[i >> 1] + 1

    # jump pointers
    maxd = 0
    for v in range(n):
        if depth[v] > maxd:
            maxd = depth[v]
    jlev = _floor_log2(max(maxd, 1)) + 1
    jump = np.full((jlev, max(n, 1)), -1, dtype=np.int64)
    for v in range(n):
        jump[0, v] = parent[v]
    for lv in range(1, jlev):
        for v in range(n):
            mid = jump[lv - 1, v]
            jump[lv, v] = -1 if mid < 0 else jump[lv - 1, mid]

    # long-path ladders
    height = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        v = order[i]
        p = parent[v]
        if p >= 0 and height[v] + 1 > height[p]:
            height[p] = height[v] + 1
    longchild = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        best = -1
        for j in range(start[v], start[v + 1]):
            c = kids[j]
            if best < 0 or height[c] > height[best]:
                best = c
        longchild[v] = best
    ladder = np.empty(max(2 * n, 1), dtype=np.int64)
    lad_start = np.zeros(n, dtype=np.int64)  # per node: ladder offset of its path
    lad_pos = np.zeros(n, dtype=np.int64)    # per node: index within that ladder
    fill = 0
    for i in range(n):
        t = order[i]
        p = parent[t]
        if p >= 0 and longchild[p] == t:
            continue
        length = height[t] + 1
        up = length if length < depth[t] else depth[t]
        base = fill
        # ancestors of t, highest first
        a = t
        for s in range(up):
            a = parent[a]
            ladder[base + up - 1 - s] = a
        fill += up
        x = t
        q = 0
        while x >= 0:
            ladder[fill] = x
            lad_start[x] = base
            lad_pos[x] = up + q
            fill += 1
            q += 1
            x = longchild[x]
    ladder = ladder[:fill]
    return depth, euler, first, sparse, logt, jump, ladder, lad_start, lad_pos


@njit
def lca_query(depth, euler, first, sparse, logt, a, b):
    i = first[a]
    j = first[b]
    if i > j:
        i, j = j, i
    lv = logt[j - i + 1]
    x = sparse[lv, i]
    y = sparse[lv, j - (1 << lv) + 1]
    return x if depth[x] <= depth[y] else y


@njit
def la_query(depth, jump, ladder, lad_start, lad_pos, v, level):
    d = depth[v] - level
    if d == 0:
        return v
    j = 0
    x = d
    while x > 1:
        x >>= 1
        j += 1
    w = jump[j, v]
    r = d - (1 << j)
    return ladder[lad_start[w] + lad_pos[w] - r]


class TreeIndex:
    """LCA and level-ancestor index over a forest given by parent links.

    Queries between nodes of different trees are meaningless.
    """

    def __init__(self, parent):
        self.parent = np.ascontiguousarray(parent, dtype=np.int64)
        (self.depth, self.euler, self.first, self.sparse, self.logt, self.jump,
         self.ladder, self.lad_start, self.lad_pos) = build_index(self.parent)

    def __len__(self):
        return len(self.parent)

    def lca(self, a: int, b: int) -> int:
        return int(lca_query(self.depth, self.euler, self.first, self.sparse, self.logt, a, b))

    def level_ancestor(self, v: int, level: int) -> int:
        if not 0 <= level <= self.depth[v]:
            raise ValueError(f"level {level} outside [0, {self.depth[v]}]")
        return int(la_query(self.depth, self.jump, self.ladder, self.lad_start, self.lad_pos,
                            v, level))

    @property
    def lca_arrays(self):
        return self.depth, self.euler, self.first, self.sparse, self.logt

    @property
    def la_arrays(self):
        return self.depth, self.jump, self.ladder, self.lad_start, self.lad_pos
