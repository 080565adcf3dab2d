"""Coherence decomposition of multipartite qubit states under the square-root quantum Jensen-Shannon divergence."""
from .coherence import (
    CoherenceReport,
    bipartition_coherence,
    decomposition_report,
    intrinsic_coherence,
    local_coherence,
    monogamy,
    pairwise_intrinsic,
    site_coherence,
    total_coherence,
)
from .minimizers import MinimizationResult, OptimOptions, SeparableAnsatz, closest_incoherent, closest_separable
from .quantum import (
    QuantumState,
    partial_trace,
    qjsd,
    qjsd_distance,
    tensor,
    vn_entropy,
)
from .spin_models import ModelSpec, build_ising2, build_xxz, ground_state
from .states import BasisSpec, bell_state, ghz_state, product_plus_state, w_state, werner_ghz

__version__ = "0.1.0"
