"""Command line front end: ``hopnav <command> ...``.

Exit codes: 0 success, 2 input error, 3 property violation, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import ackermann
from .applications import (
    VerifierState,
    approximate_mst,
    approximate_spt,
    eval_lower_bound,
    greedy_spanner,
    sparsify,
    stretch,
    verify_mst_edge,
)
from .hopspanner import build
from .pathquery import annotate, find_path, product_query
from .routing import CoverRouting, RoutingScheme
from .treecover import (
    FiniteMetric,
    build_navigator,
    format_metric,
    load_cover,
    read_metric,
    single_tree_cover,
    star_cover,
)
from .treemetric import (
    TreeFormatError,
    WeightedTree,
    all_pairs_distances,
    format_tree,
    path_tree,
    read_tree,
)

EXIT_OK, EXIT_INPUT, EXIT_PROPERTY, EXIT_INTERNAL = 0, 2, 3, 4
SIZE_CONSTANT = 4.0

log = logging.getLogger("hopnav")


class PropertyViolation(Exception):
    pass


# -- output helpers --------------------------------------------------------------


class Emitter:
    """Rows go out as aligned text or CSV, to --out or stdout."""

    def __init__(self, args):
        self.fmt = args.format
        self.out = args.out

    def table(self, header, rows, path=None):
        buf = io.StringIO()
        if self.fmt == "csv":
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows([[_fmt(x) for x in r] for r in rows])
        else:
            buf.write(" ".join(header) + "\n")
            for r in rows:
                buf.write(" ".join(_fmt(x) for x in r) + "\n")
        self.write(buf.getvalue(), path)

    def write(self, text, path=None):
        target = path or self.out
        if target:
            Path(target).write_text(text)
        else:
            sys.stdout.write(text)


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return "-".join(str(v) for v in x)
    return str(x)


def _ext(tree, v):
    return int(tree.ids[v])


def _int_of(tree, ext_id):
    try:
        return tree.index[int(ext_id)]
    except KeyError:
        raise KeyError(f"unknown vertex id {ext_id}") from None


def _read_pairs(path):
    out = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            parts = ln.split()
            if len(parts) < 2:
                raise TreeFormatError(f"bad pair line: {ln!r}")
            out.append(parts)
    return out


def _load_space(args):
    """(metric, cover) from --tree or --metric (+ optional --cover)."""
    if getattr(args, "tree", None):
        tree = read_tree(args.tree)
        M = FiniteMetric(all_pairs_distances(tree), validate=False)
        cover = single_tree_cover(tree)
    elif getattr(args, "metric", None):
        M = read_metric(args.metric)
        cover = star_cover(M)
    else:
        raise ValueError("give --tree or --metric")
    if getattr(args, "cover", None):
        cover = load_cover(args.cover, M)
    return M, cover


# -- commands ---------------------------------------------------------------------


def cmd_alpha(args):
    rows = []
    for n in args.n:
        row = [args.k, n, ackermann.alpha_k(args.k, n), ackermann.alpha_prime(args.k, n),
               ackermann.alpha_inv(n)]
        rows.append(row)
    Emitter(args).table(["k", "n", "alpha_k", "alpha_prime", "alpha"], rows)


def cmd_gen(args):
    n = args.n
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(args.seed)
    if args.kind == "uniform-line":
        # vertices 1..n, unit gaps, so tree distance is |i - j|
        edges = [(i, i + 1, 1) for i in range(n - 1)]
        tree = WeightedTree.from_edges(n, edges, 0, ids=np.arange(1, n + 1))
        text = format_tree(tree)
    elif args.kind == "random-tree":
        parent = [-1] + [int(rng.integers(0, i)) for i in range(1, n)]
        if args.float:
            wts = rng.uniform(1, args.max_weight, n).tolist()
        else:
            wts = rng.integers(1, args.max_weight + 1, n).tolist()
        edges = [(i, parent[i], wts[i]) for i in range(1, n)]
        text = format_tree(WeightedTree.from_edges(n, edges, 0))
    elif args.kind == "random-points":
        pts = rng.random((n, args.dim))
        text = format_metric(FiniteMetric.from_points(pts, validate=False))
    else:
        # L1 distances of distinct integer points: an integral metric
        if args.float:
            pts = rng.random((n, args.dim)) * args.max_weight
            d = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
            Emitter(args).write(format_metric(FiniteMetric(d)))
            return
        side = max(args.max_weight, n) + 1
        pts = rng.integers(0, side, size=(n, args.dim))
        while len(np.unique(pts, axis=0)) < n:
            pts = rng.integers(0, side, size=(n, args.dim))
        d = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
        text = format_metric(FiniteMetric(d))
    Emitter(args).write(text)


def cmd_build(args):
    tree = read_tree(args.tree)
    t0 = time.perf_counter()
    sp, D = build(tree, tree.root, None, args.k)
    elapsed = time.perf_counter() - t0
    lines = [f"{_ext(tree, a)} {_ext(tree, b)} {w}" for (a, b), w in
             zip(sp.edges.tolist(), sp.weights.tolist())]
    text = "\n".join(lines) + ("\n" if lines else "")
    out = args.out
    if out and not out.endswith(".txt"):
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "spanner.txt").write_text(text)
        (d / "tree.txt").write_text(format_tree(tree))
        (d / "meta.json").write_text(json.dumps({"k": args.k, "edges": len(sp)}))
    elif out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.stats:
        n = tree.n
        ap = ackermann.alpha_prime(args.k, n)
        with open(args.stats, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "k", "edges", "alpha_prime", "ratio", "phi_nodes", "seconds"])
            w.writerow([n, args.k, len(sp), ap, len(sp) / (n * max(ap, 1)), len(D),
                        f"{elapsed:.4f}"])


def _load_built(directory):
    d = Path(directory)
    meta = json.loads((d / "meta.json").read_text())
    tree = read_tree(d / "tree.txt")
    sp, D = build(tree, tree.root, None, int(meta["k"]))
    stored = (d / "spanner.txt").read_text().split()
    if len(stored) // 3 != len(sp):
        raise ValueError("spanner.txt does not match the rebuilt spanner")
    return tree, sp, D


def cmd_query(args):
    tree, sp, D = _load_built(args.spanner_dir)
    u, v = _int_of(tree, args.u), _int_of(tree, args.v)
    p = find_path(D, u, v)
    header = ["path", "hops", "weight"]
    row = [[_ext(tree, x) for x in p.vertices], p.hops, p.weight]
    if args.count_ops:
        header += ["invocations", "semigroup_ops"]
        row += [p.calls, max(p.hops - 1, 0)]
    Emitter(args).table(header, [row])


def cmd_route(args):
    pairs = _read_pairs(args.pairs)
    rows = []
    if args.cover:
        M = read_metric(args.metric) if args.metric else None
        cover = load_cover(args.cover, M)
        cr = CoverRouting(cover, args.seed)
        schemes = cr.schemes
        for a, b, *_ in pairs:
            tr, i = cr.route(int(a), int(b))
            rows.append([int(a), int(b), i, list(tr.vertices), tr.hops, tr.weight])
        header = ["u", "v", "tree", "trace", "hops", "weight"]
    else:
        tree = read_tree(args.tree)
        s = RoutingScheme(tree, args.seed)
        schemes = [s]
        for a, b, *_ in pairs:
            u, v = _int_of(tree, a), _int_of(tree, b)
            tr = s.route(u, v)
            if tr.hops > 2:
                raise PropertyViolation(f"route {a}->{b} took {tr.hops} hops")
            rows.append([int(a), int(b), [_ext(tree, x) for x in tr.vertices], tr.hops,
                         tr.weight])
        header = ["u", "v", "trace", "hops", "weight"]
    em = Emitter(args)
    em.table(header, rows)
    if args.audit:
        audit = []
        for i, s in enumerate(schemes):
            n = s.n
            audit.append([i, n, int(s.entry_counts().max(initial=0)),
                          int(s.bit_sizes().max(initial=0)),
                          s.bit_sizes().max(initial=0) / max(1.0, math.log2(max(n, 2))) ** 2])
        em.table(["tree", "n", "max_entries", "max_bits", "bits_over_log2sq"], audit,
                 path=args.audit)


def cmd_spt(args):
    M, cover = _load_space(args)
    nav = build_navigator(M, cover, args.k)
    res = approximate_spt(nav, args.root)
    rows = [[v, res.parent[v], res.dist[v], M.dist[args.root, v].item() if v < M.n else ""]
            for v in sorted(res.parent) if res.parent[v] is not None]
    Emitter(args).table(["v", "parent", "dist", "metric_dist"], rows)


def cmd_mst(args):
    M, cover = _load_space(args)
    nav = build_navigator(M, cover, args.k)
    edges, w = approximate_mst(M, nav)
    rows = [list(e) for e in edges] + [["total", "", w]]
    Emitter(args).table(["a", "b", "w"], rows)


def cmd_sparsify(args):
    M, cover = _load_space(args)
    nav = build_navigator(M, cover, args.k)
    if args.graph:
        G = {}
        for parts in _read_pairs(args.graph):
            a, b = int(parts[0]), int(parts[1])
            G[(min(a, b), max(a, b))] = M.dist[a, b].item()
    else:
        G = greedy_spanner(M, args.greedy)
    H = sparsify([(a, b, w) for (a, b), w in G.items()], nav)
    rows = [[a, b, w] for (a, b), w in sorted(H.items())]
    em = Emitter(args)
    em.table(["a", "b", "w"], rows)
    if args.summary:
        em.table(["edges_in", "edges_out", "weight_in", "weight_out", "stretch_in", "stretch_out"],
                 [[len(G), len(H), sum(G.values()), sum(H.values()), stretch(M, G),
                   stretch(M, H)]], path=args.summary)


def cmd_verify_mst(args):
    tree = read_tree(args.tree)
    V = VerifierState(tree, args.k)
    rows = []
    for parts in _read_pairs(args.queries):
        u, v = _int_of(tree, parts[0]), _int_of(tree, parts[1])
        w = float(parts[2]) if len(parts) > 2 else 0
        ok, c = verify_mst_edge(V, u, v, w, optimized=args.optimized)
        rows.append([parts[0], parts[1], parts[2] if len(parts) > 2 else 0, int(ok), c])
    Emitter(args).table(["u", "v", "w", "heavier_than_path_max", "comparisons"], rows)


_OPS = {"sum": lambda a, b: a + b, "max": max, "min": min}


def cmd_product(args):
    tree = read_tree(args.tree)
    _, D = build(tree, tree.root, None, args.k)
    op = _OPS[args.op]
    ann = annotate(D, tree.weight.tolist(), op, identity=0 if args.op == "sum" else None)
    rows = []
    for parts in _read_pairs(args.pairs):
        u, v = _int_of(tree, parts[0]), _int_of(tree, parts[1])
        cnt = [0]
        val = product_query(D, ann, u, v, cnt) if u != v or args.op == "sum" else None
        rows.append([parts[0], parts[1], val, cnt[0]])
    Emitter(args).table(["u", "v", "product", "ops"], rows)


def bench_records(ns, ks):
    """One record per (n, k) on the uniform line; flags violations."""
    recs = []
    for n in ns:
        tree = path_tree([1] * (n - 1))
        for k in ks:
            t0 = time.perf_counter()
            sp, _ = build(tree, 0, None, k)
            secs = time.perf_counter() - t0
            ap = ackermann.alpha_prime(k, n)
            lb = eval_lower_bound(n, k) if k in (2, 3) else None
            ratio = len(sp) / (n * max(ap, 1))
            ok = (n < 2 or len(sp) >= n - 1) and ratio <= SIZE_CONSTANT
            if lb is not None:
                ok = ok and len(sp) >= math.ceil(lb)
            recs.append({"n": n, "k": k, "edges": len(sp), "alpha_prime": ap,
                         "lower_bound": "" if lb is None else round(lb, 3),
                         "ratio": round(ratio, 6), "seconds": round(secs, 4), "ok": int(ok)})
    return recs


BENCH_FIELDS = ["n", "k", "edges", "alpha_prime", "lower_bound", "ratio", "seconds", "ok"]


def cmd_bench(args):
    recs = bench_records(args.n, args.k)
    args.format = "csv" if args.format == "text" and args.out else args.format
    Emitter(args).table(BENCH_FIELDS, [[r[f] for f in BENCH_FIELDS] for r in recs])
    bad = [r for r in recs if not r["ok"]]
    if bad:
        raise PropertyViolation(f"{len(bad)} bench cell(s) violate a size bound")


def _int_list(s):
    return [int(x) for x in s.split(",") if x.strip()] if s else []


def make_parser():
    def globals_(default):
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--seed", type=int, default=default(0))
        g.add_argument("--out", default=default(None), help="output file (default stdout)")
        g.add_argument("--format", choices=("text", "csv"), default=default("text"))
        g.add_argument("-v", "--verbose", action="store_true", default=default(False))
        return g

    # global flags work before or after the command; the copy attached to
    # each command must not overwrite values given before it
    common = globals_(lambda _: argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="hopnav", parents=[globals_(lambda v: v)],
                                description="k-hop 1-spanners for tree metrics and applications")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("alpha", parents=[common], help="inverse Ackermann values")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=_int_list, required=True, help="comma separated")
    s.set_defaults(func=cmd_alpha)

    s = sub.add_parser("gen", parents=[common], help="generate an instance file")
    s.add_argument("kind", choices=("uniform-line", "random-tree", "random-points", "random-matrix"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-weight", type=int, default=10)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--float", action="store_true", help="real-valued weights instead of integers")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("build", parents=[common], help="build a k-hop spanner")
    s.add_argument("--tree", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--stats", default=None)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("query", parents=[common], help="k-hop path between two vertices")
    s.add_argument("--spanner-dir", required=True)
    s.add_argument("--u", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--count-ops", action="store_true")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("route", parents=[common], help="simulate 2-hop routing")
    s.add_argument("--tree")
    s.add_argument("--cover")
    s.add_argument("--metric")
    s.add_argument("--pairs", required=True)
    s.add_argument("--audit", default=None, help="write the size audit here")
    s.set_defaults(func=cmd_route)

    for name, fn, hlp in (("spt", cmd_spt, "approximate shortest-path tree"),
                          ("mst", cmd_mst, "approximate minimum spanning tree"),
                          ("sparsify", cmd_sparsify, "sparsify a graph over the metric")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--tree")
        s.add_argument("--metric")
        s.add_argument("--cover")
        s.add_argument("--k", type=int, default=2)
        if name == "spt":
            s.add_argument("--root", type=int, default=0)
        if name == "sparsify":
            s.add_argument("--graph", default=None, help="edge list 'a b' (default: greedy spanner)")
            s.add_argument("--greedy", type=float, default=3.0)
            s.add_argument("--summary", default=None)
        s.set_defaults(func=fn)

    s = sub.add_parser("verify-mst", parents=[common], help="online MST verification")
    s.add_argument("--tree", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--queries", required=True, help="lines 'u v w'")
    s.add_argument("--optimized", action="store_true")
    s.set_defaults(func=cmd_verify_mst)

    s = sub.add_parser("product", parents=[common], help="tree path products of edge weights")
    s.add_argument("--tree", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--pairs", required=True)
    s.add_argument("--op", choices=sorted(_OPS), default="sum")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("bench", parents=[common], help="size vs lower-bound benchmark")
    s.add_argument("--n", type=_int_list, default=[])
    s.add_argument("--k", type=_int_list, default=[])
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except PropertyViolation as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (TreeFormatError, ValueError, KeyError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
