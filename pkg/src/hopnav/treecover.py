"""Tree covers of finite metrics and navigation through per-tree spanners.

Points of the metric are ``0..n-1`` and are the vertices ``0..n-1`` of every
cover tree; any further tree vertices are Steiner vertices.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hopspanner import build
from .pathquery import SpannerPath, find_path
from .treemetric import (
    TreeFormatError,
    WeightedTree,
    all_pairs_distances,
    format_tree,
    parse_tree,
)

log = logging.getLogger(__name__)

RTOL = 1e-12
FULL_CHECK_LIMIT = 512


class CoverError(ValueError):
    """Cover failing domination or coverage; ``witness`` is the offending pair."""

    def __init__(self, msg, witness=None, tree=None):
        super().__init__(msg)
        self.witness = witness
        self.tree = tree


def _le(a, b, integral):
    """a <= b, with a relative tolerance for floats."""
    if integral:
        return a <= b
    return a <= b + RTOL * max(abs(a), abs(b))


class FiniteMetric:
    """Distance matrix over points 0..n-1."""

    def __init__(self, dist, coords=None, validate=True, rng=None):
        d = np.asarray(dist)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.issubdtype(d.dtype, np.integer):
            d = d.astype(np.int64)
        else:
            d = d.astype(np.float64)
        self.dist = d
        self.coords = coords
        if validate:
            self.validate(rng)

    @property
    def n(self):
        return self.dist.shape[0]

    def __len__(self):
        return self.n

    @property
    def is_integral(self):
        return np.issubdtype(self.dist.dtype, np.integer)

    def __call__(self, x, y):
        return self.dist[x, y].item()

    @classmethod
    def from_points(cls, points, validate=True):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.sqrt((diff * diff).sum(axis=2))
        return cls(d, coords=pts, validate=validate)

    def validate(self, rng=None):
        d = self.dist
        n = self.n
        if not np.all(np.isfinite(d)) or (d < 0).any():
            raise ValueError("distances must be finite and non-negative")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix is not symmetric")
        if (np.diag(d) != 0).any():
            raise ValueError("diagonal must be zero")
        off = d + np.eye(n, dtype=d.dtype)
        if n > 1 and (off[~np.eye(n, dtype=bool)] == 0).any():
            raise ValueError("distinct points at distance zero")
        tol = 0 if self.is_integral else RTOL * (float(d.max()) if n else 0.0)
        if n <= FULL_CHECK_LIMIT:
            for z in range(n):
                via = d[:, z][:, None] + d[z, :][None, :]
                bad = np.argwhere(d > via + tol)
                if len(bad):
                    x, y = bad[0]
                    raise ValueError(f"triangle inequality fails for ({x}, {y}) via {z}")
        else:
            rng = np.random.default_rng(0) if rng is None else rng
            trip = rng.integers(0, n, size=(200_000, 3))
            x, y, z = trip.T
            bad = d[x, y] > d[x, z] + d[z, y] + tol
            if bad.any():
                i = int(np.argmax(bad))
                raise ValueError(f"triangle inequality fails for ({x[i]}, {y[i]}) via {z[i]}")


@dataclass
class TreeCover:
    trees: list
    gamma: float = 1.0
    ramsey: np.ndarray | None = None

    @property
    def zeta(self):
        return len(self.trees)

    def __len__(self):
        return len(self.trees)


def star_cover(M: FiniteMetric) -> TreeCover:
    """One star per point, centred there; a Ramsey cover with stretch 1."""
    n = M.n
    if n < 1:
        raise ValueError("star_cover needs at least one point")
    trees = []
    for x in range(n):
        edges = [(x, y, M.dist[x, y].item()) for y in range(n) if y != x]
        trees.append(WeightedTree.from_edges(n, edges, root=x))
    return TreeCover(trees, 1.0, np.arange(n, dtype=np.int64))


def single_tree_cover(T: WeightedTree) -> TreeCover:
    """A tree metric covers itself; the Ramsey map sends every point to tree 0."""
    return TreeCover([T], 1.0, np.zeros(T.n, dtype=np.int64))


def check_cover(M: FiniteMetric, cover: TreeCover, coverage=True):
    """Raise CoverError on the first domination or coverage failure."""
    n = M.n
    if not cover.trees:
        raise ValueError("a cover needs at least one tree")
    integral = M.is_integral
    best = None
    for i, t in enumerate(cover.trees):
        if t.n < n:
            raise CoverError(f"tree {i} has {t.n} vertices, fewer than the {n} points", tree=i)
        dt = all_pairs_distances(t)[:n, :n]
        integral_i = integral and np.issubdtype(dt.dtype, np.integer)
        d = M.dist
        if integral_i:
            viol = dt < d
        else:
            viol = dt < d - RTOL * np.maximum(np.abs(dt), np.abs(d))
        if viol.any():
            x, y = (int(a) for a in np.argwhere(viol)[0])
            raise CoverError(
                f"tree {i} does not dominate the metric: d_T({x},{y})={dt[x, y]} < {d[x, y]}",
                witness=(x, y), tree=i)
        if coverage:
            if cover.ramsey is not None:
                rows = np.flatnonzero(cover.ramsey == i)
                for x in rows.tolist():
                    for y in range(n):
                        if not _le(dt[x, y], cover.gamma * d[x, y], integral_i):
                            raise CoverError(
                                f"Ramsey tree {i} of point {x} stretches ({x},{y}) beyond "
                                f"{cover.gamma}", witness=(x, y), tree=i)
            best = dt if best is None else np.minimum(best, dt)
    if coverage and cover.ramsey is None:
        for x in range(n):
            for y in range(n):
                if not _le(best[x, y], cover.gamma * M.dist[x, y], integral):
                    raise CoverError(f"no tree achieves stretch {cover.gamma} on ({x},{y})",
                                     witness=(x, y))


def save_cover(cover: TreeCover, directory) -> Path:
    """Write ``cover.txt`` plus one tree file per tree; returns the cover path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    lines = [f"{cover.gamma} {cover.zeta}" + (" ramsey" if cover.ramsey is not None else "")]
    for i, t in enumerate(cover.trees):
        name = f"tree{i}.txt"
        (d / name).write_text(format_tree(t))
        lines.append(name)
    if cover.ramsey is not None:
        lines += [f"{x} {int(t)}" for x, t in enumerate(cover.ramsey)]
    path = d / "cover.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def load_cover(path, metric: FiniteMetric | None = None, validate=True) -> TreeCover:
    """Read a cover file: header ``gamma zeta [ramsey]``, then zeta tree file
    names (relative to the cover file), then ``point tree-index`` lines.

    With a metric and ``validate`` set, domination is checked exactly and
    coverage at the declared stretch (for up to 1024 points).
    """
    path = Path(path)
    if path.is_dir():
        path = path / "cover.txt"
    rows = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    if not rows:
        raise TreeFormatError("empty cover file")
    head = rows[0]
    try:
        gamma = float(head[0])
        zeta = int(head[1])
    except (IndexError, ValueError) as exc:
        raise TreeFormatError(f"bad cover header: {' '.join(head)}") from exc
    ramsey_flag = len(head) > 2 and head[2] == "ramsey"
    if zeta < 1:
        raise ValueError("a cover needs at least one tree")
    if len(rows) < 1 + zeta:
        raise TreeFormatError("cover file lists fewer trees than declared")
    trees = []
    for r in rows[1:1 + zeta]:
        trees.append(parse_tree((path.parent / r[0]).read_text()))
    ramsey = None
    if ramsey_flag:
        npts = metric.n if metric is not None else min(t.n for t in trees)
        ramsey = np.full(npts, -1, dtype=np.int64)
        for r in rows[1 + zeta:]:
            x, t = int(r[0]), int(r[1])
            if not (0 <= x < npts and 0 <= t < zeta):
                raise TreeFormatError(f"bad Ramsey line: {' '.join(r)}")
            ramsey[x] = t
        if (ramsey < 0).any():
            raise TreeFormatError("Ramsey map misses some points")
    cover = TreeCover(trees, gamma, ramsey)
    if validate and metric is not None:
        check_cover(metric, cover, coverage=metric.n <= 1024)
    return cover


@dataclass
class MetricNavigator:
    metric: FiniteMetric
    cover: TreeCover
    k: int
    structures: list = field(default_factory=list)

    @property
    def n(self):
        return self.metric.n

    def global_id(self, tree_idx, v):
        """Points keep their ids; Steiner vertices get ids past n, per tree."""
        if v < self.n:
            return v
        return self._offsets[tree_idx] + v - self.n

    def _globalize(self, i, path):
        if all(x < self.n for x in path.vertices):
            return path
        verts = tuple(self.global_id(i, x) for x in path.vertices)
        return SpannerPath(verts, path.weight, path.calls)

    def union_edges(self) -> dict:
        """Union spanner H_X: ``{(a, b): weight}`` over global ids, a < b."""
        out = {}
        for i, (sp, _) in enumerate(self.structures):
            for (a, b), w in zip(sp.edges.tolist(), sp.weights.tolist()):
                ga, gb = self.global_id(i, a), self.global_id(i, b)
                key = (ga, gb) if ga < gb else (gb, ga)
                if key not in out or w < out[key]:
                    out[key] = w
        return out

    @property
    def total_edges(self):
        return sum(len(sp) for sp, _ in self.structures)


def build_navigator(M: FiniteMetric, cover: TreeCover, k: int) -> MetricNavigator:
    if k < 2:
        raise ValueError("hop parameter k must be >= 2")
    nav = MetricNavigator(M, cover, k)
    offsets = []
    nxt = M.n
    for t in cover.trees:
        offsets.append(nxt)
        nxt += t.n - M.n
        nav.structures.append(build(t, t.root, range(M.n), k))
    nav._offsets = offsets
    log.debug("navigator: %d trees, %d spanner edges", cover.zeta, nav.total_edges)
    return nav


def metric_find_path(nav: MetricNavigator, u: int, v: int):
    """Return ``(SpannerPath, tree index)`` with at most k hops and weight
    within the cover's stretch of the metric distance.

    Ramsey covers use the source's tree; otherwise every tree is tried and
    the lightest path kept.
    """
    n = nav.n
    for x in (u, v):
        if not 0 <= x < n:
            raise KeyError(f"unknown point {x}")
    cover = nav.cover
    if cover.ramsey is not None:
        i = int(cover.ramsey[u])
        return nav._globalize(i, find_path(nav.structures[i][1], u, v)), i
    best = None
    for i, (_, D) in enumerate(nav.structures):
        p = find_path(D, u, v)
        if best is None or p.weight < best[0].weight:
            best = (p, i)
    return nav._globalize(best[1], best[0]), best[1]


def suppress_steiner(nav: MetricNavigator, path: SpannerPath) -> SpannerPath:
    """Drop Steiner interior vertices, keeping points only."""
    keep = tuple(x for x in path.vertices if x < nav.n)
    return SpannerPath(keep, path.weight, path.calls)


def parse_metric(text: str, validate=True) -> FiniteMetric:
    """``matrix n`` followed by n rows, or ``points n d`` followed by n
    coordinate rows (Euclidean distances)."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise TreeFormatError("empty metric file")
    head = rows[0]
    try:
        if head[0] == "matrix" and len(head) == 2:
            n = int(head[1])
            if len(rows) != n + 1:
                raise TreeFormatError(f"expected {n} matrix rows, got {len(rows) - 1}")
            vals = [[_num(x) for x in r] for r in rows[1:]]
            if any(len(r) != n for r in vals):
                raise TreeFormatError("matrix rows must have n entries")
            return FiniteMetric(np.array(vals), validate=validate)
        if head[0] == "points" and len(head) == 3:
            n, d = int(head[1]), int(head[2])
            if len(rows) != n + 1 or any(len(r) != d for r in rows[1:]):
                raise TreeFormatError("points file does not match its header")
            pts = np.array([[float(x) for x in r] for r in rows[1:]], dtype=np.float64)
            return FiniteMetric.from_points(pts.reshape(n, d), validate=validate)
    except ValueError as exc:
        if isinstance(exc, TreeFormatError):
            raise
        raise TreeFormatError(f"bad metric file: {exc}") from exc
    raise TreeFormatError("metric header must be 'matrix n' or 'points n d'")


def _num(s):
    try:
        return int(s)
    except ValueError:
        return float(s)


def format_metric(M: FiniteMetric) -> str:
    if M.coords is not None:
        n, d = M.coords.shape
        lines = [f"points {n} {d}"] + [" ".join(repr(float(x)) for x in row) for row in M.coords]
    else:
        lines = [f"matrix {M.n}"] + [" ".join(str(x) for x in row) for row in M.dist.tolist()]
    return "\n".join(lines) + "\n"


def read_metric(path, validate=True) -> FiniteMetric:
    return parse_metric(Path(path).read_text(), validate)
