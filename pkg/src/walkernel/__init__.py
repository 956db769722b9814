"""Graph-kernel computation library: random-walk kernels on product graphs
with fast solvers, spectral/diffusion kernels, and a semiring/transducer
layer, plus a benchmark CLI."""

from . import features, graph, kernels, linalg, semiring, transducer
from .graph import Graph, make_graph, random_graph_set1, random_graph_set2
from .kernels import (
    KernelConfig,
    KernelResult,
    cartesian_walk_kernel,
    composite_kernel,
    diffusion_vertex_kernel,
    geometric_kernel,
    gram_matrix,
    marginalized_kernel,
    optimal_assignment_kernel,
    psd_check,
    random_walk_kernel,
    spectral_kernel_family,
)

__version__ = "0.1.0"

__all__ = [
    "Graph", "KernelConfig", "KernelResult", "make_graph",
    "random_graph_set1", "random_graph_set2", "random_walk_kernel",
    "geometric_kernel", "marginalized_kernel", "cartesian_walk_kernel",
    "composite_kernel", "diffusion_vertex_kernel", "spectral_kernel_family",
    "optimal_assignment_kernel", "gram_matrix", "psd_check",
    "features", "graph", "kernels", "linalg", "semiring", "transducer",
]
