"""Relative bottleneck tools for finite unit-edge graphs.

Verify the relative bottleneck property, build the associated tree-graded
space with its collapse map, and embed tree-graded graphs in products of trees.
"""

from .kernels import BACKEND
from .metric_graph import (
    MetricGraph,
    blocks_all_paths,
    canonical_geodesic,
    check_manning_bp,
    closed_neighborhood,
    open_ball,
)
from .rbp import (
    BottleneckChain,
    PieceDecomposition,
    RbpStructure,
    check_quasi_convexity,
    check_tree_graded,
    find_cutting_ball,
    thicken,
    transport_qi,
    tree_graded_certificate,
    verify_bottleneck_chain,
    verify_rbp,
)
from .construction import construct, level_equivalence
from .treegraded import (
    TreeGradedSpace,
    build_tree_graded,
    collapse,
    measure_distortion,
    tg_distance,
    verify_tree_graded,
)
from .embedding import (
    PieceTreeEmbedding,
    cycle_embedding,
    embed_tree_graded,
    measure_embedding,
    strong_product,
)
from .generators import GeneratorSpec, generate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BottleneckChain",
    "GeneratorSpec",
    "MetricGraph",
    "PieceDecomposition",
    "PieceTreeEmbedding",
    "RbpStructure",
    "TreeGradedSpace",
    "blocks_all_paths",
    "build_tree_graded",
    "canonical_geodesic",
    "check_manning_bp",
    "check_quasi_convexity",
    "check_tree_graded",
    "closed_neighborhood",
    "collapse",
    "construct",
    "cycle_embedding",
    "embed_tree_graded",
    "find_cutting_ball",
    "generate",
    "level_equivalence",
    "measure_distortion",
    "measure_embedding",
    "open_ball",
    "strong_product",
    "tg_distance",
    "thicken",
    "transport_qi",
    "tree_graded_certificate",
    "verify_bottleneck_chain",
    "verify_rbp",
    "verify_tree_graded",
]
