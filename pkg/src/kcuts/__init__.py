"""Many disjoint sparse cuts from the bottom of the normalized Laplacian spectrum."""

__version__ = "0.1.0"

from .certify import (
    Certificate,
    brute_force_k_cuts,
    brute_force_min_expansion,
    complete_to_partition,
    small_set,
    verify_lower_bound,
)
from .graph import (
    Cut,
    GraphError,
    WeightedGraph,
    expansion,
    gen_appendix_a,
    gen_fig2,
    gen_test_family,
    load_edge_list,
)
from .rounding import (
    CutReport,
    RoundedFamily,
    many_sparse_cuts,
    moment_probe,
    normal_quantile,
    round_embedding,
    sample_gaussians,
    sweep_cut,
)
from .spectral import SpectralData, bottom_k_eigs, embedding, normalized_laplacian, spectral_data
