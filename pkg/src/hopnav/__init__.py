"""Low-hop 1-spanners for tree metrics with constant-per-hop path queries,
tree-cover navigation, routing and path-product applications."""
from .ackermann import alpha_inv, alpha_k, alpha_prime, eval_A, eval_B, lambda_i
from .hopspanner import HopSpanner, RecursionTree, build, handle_base_case
from .pathquery import SpannerPath, annotate, find_path, product_query
from .treecover import (
    FiniteMetric,
    TreeCover,
    build_navigator,
    load_cover,
    metric_find_path,
    single_tree_cover,
    star_cover,
)
from .treemetric import WeightedTree, decompose, parse_tree, prune, tree_distance

__version__ = "0.1.0"

__all__ = [
    "FiniteMetric", "HopSpanner", "RecursionTree", "SpannerPath", "TreeCover", "WeightedTree",
    "alpha_inv", "alpha_k", "alpha_prime", "annotate", "build", "build_navigator", "decompose",
    "eval_A", "eval_B", "find_path", "handle_base_case", "lambda_i", "load_cover",
    "metric_find_path", "parse_tree", "product_query", "prune", "single_tree_cover",
    "star_cover", "tree_distance",
]
