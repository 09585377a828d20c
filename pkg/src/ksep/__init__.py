"""Exact tools for intersecting families of k-separated sets on the n-cycle."""

from .compression import (
    CompressionTrace,
    PreconditionError,
    UnsupportedRegimeError,
    build_decomposition,
    check_proof_invariants,
    compress_family,
    replay_induction,
    shift,
)
from .core import (
    InputError,
    KSepError,
    KSet,
    Params,
    binomial,
    count_k_separated,
    enumerate_k_separated,
    is_k_separated,
    predicted_bound,
    rotate_set,
)
from .family import (
    CompatGraph,
    Family,
    compatibility_graph,
    is_intersecting,
    restrict_pair,
    sample_intersecting,
    star,
    trace,
)
from .search import (
    CapacityError,
    SearchResult,
    brute_force_max,
    max_clique,
    max_intersecting,
    verify_bound_sweep,
)

__version__ = "0.1.0"
