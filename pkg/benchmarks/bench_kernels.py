"""Compiled vs. pure-Python timings for the hot kernels.

Two comparisons:

* per kernel, the numba dispatcher against its ``py_func`` on identical inputs
  (nested kernels called from a ``py_func`` stay compiled);
* end to end, the same workload in a child process with and without
  ``HOPNAV_DISABLE_NUMBA=1``, so every kernel runs as plain Python.

    python3 benchmarks/bench_kernels.py [--n 512] [--repeat 3] [--csv out.csv]
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _random_tree(n, seed):
    from hopnav.treemetric import WeightedTree

    rng = np.random.default_rng(seed)
    parent = [-1] + [int(rng.integers(0, i)) for i in range(1, n)]
    edges = [(i, parent[i], int(rng.integers(1, 10))) for i in range(1, n)]
    return WeightedTree.from_edges(n, edges)


def kernel_cases(n):
    """(name, kernel, args) triples over one random tree of size n."""
    from hopnav import treeindex, treemetric
    from hopnav.hopspanner import build
    from hopnav.pathquery import batch_find_paths
    from hopnav.routing import RoutingScheme, _simulate

    tree = _random_tree(n, 1)
    _, _, lp = treemetric._local_view(tree, tree.root)
    req = np.ones(n, dtype=bool)
    half = req.copy()
    half[::2] = False
    _, D = build(tree, tree.root, None, 4)
    us = np.repeat(np.arange(n), n)
    vs = np.tile(np.arange(n), n)
    rs = RoutingScheme(tree, 0)
    pairs = np.stack([us, vs], axis=1)
    g = rs.graph
    tedges = tree.edges()
    pairs_csr = treemetric.adjacency_csr(n, [(c, p) for c, p, _ in tedges],
                                         [w for _, _, w in tedges], tree.weight.dtype)
    return [
        ("build_index", treeindex.build_index, (tree.parent,)),
        ("decompose_greedy", treemetric.decompose_greedy, (lp, req, 8)),
        ("prune_kernel", treemetric.prune_kernel, (lp, half)),
        ("all_pairs_distances", treemetric._all_pairs_kernel,
         (n, *pairs_csr, np.zeros((n, n), dtype=np.int64))),
        ("find_path_batch_k4", batch_find_paths, (D.kernel_arrays, us, vs, 4, D.max_base)),
        ("routing_simulate", _simulate,
         (pairs, rs.up_off, rs.up_node, rs.up_port, rs.down_port, rs.q_off, rs.q_vert,
          rs.q_port, g.start, g.nbr, g.wt, g.slot_of_port, 2)),
    ]


def run_kernels(n, repeat):
    from hopnav._jit import USE_NUMBA, py_func

    rows = []
    for name, kern, args in kernel_cases(n):
        kern(*args)  # compile / warm the cache
        t_jit = _best(lambda: kern(*args), repeat) if USE_NUMBA else float("nan")
        t_py = _best(lambda: py_func(kern)(*args), max(1, repeat // 2))
        rows.append({"kernel": name, "n": n, "numba_s": t_jit, "python_s": t_py,
                     "speedup": t_py / t_jit if USE_NUMBA and t_jit > 0 else float("nan")})
    return rows


WORKLOAD = """
import json, time, numpy as np
from hopnav.hopspanner import build
from hopnav.pathquery import batch_find_paths
from hopnav.treemetric import WeightedTree
n = {n}
rng = np.random.default_rng(7)
parent = [-1] + [int(rng.integers(0, i)) for i in range(1, n)]
tree = WeightedTree.from_edges(n, [(i, parent[i], 1) for i in range(1, n)])
_, D = build(tree, 0, None, 4)
us = np.repeat(np.arange(n), n); vs = np.tile(np.arange(n), n)
batch_find_paths(D.kernel_arrays, us[:4], vs[:4], 4, D.max_base)
t0 = time.perf_counter()
_, D = build(tree, 0, None, 4)
t1 = time.perf_counter()
batch_find_paths(D.kernel_arrays, us, vs, 4, D.max_base)
t2 = time.perf_counter()
print(json.dumps({{"build_s": t1 - t0, "queries_s": t2 - t1}}))
"""


def run_end_to_end(n):
    out = {}
    for label, flag in (("numba", "0"), ("python", "1")):
        env = dict(os.environ, HOPNAV_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", WORKLOAD.format(n=n)], env=env,
                             capture_output=True, text=True, check=True)
        out[label] = json.loads(res.stdout.strip().splitlines()[-1])
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--csv", default=None)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    rows = run_kernels(args.n, args.repeat)
    print(f"{'kernel':<22}{'numba s':>12}{'python s':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<22}{r['numba_s']:>12.5f}{r['python_s']:>12.5f}{r['speedup']:>10.1f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    if not args.skip_end_to_end:
        e2e = run_end_to_end(min(args.n, 256))
        for label, r in e2e.items():
            print(f"end-to-end [{label}] build {r['build_s']:.3f}s, all-pairs queries "
                  f"{r['queries_s']:.3f}s")


if __name__ == "__main__":
    main()
