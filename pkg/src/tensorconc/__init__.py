"""Injective lp norms of random tensors: estimators, variance parameters,
model generators, bound evaluators, and a Monte Carlo experiment harness."""

from .bounds import (
    BoundReport,
    hypergraph_bound,
    indep_entry_bound,
    lambda_threshold,
    master_bound,
    matching_bound,
    nck_holder_bound,
    sharpest_bound,
    trivial_bound,
    type2_bound,
)
from .errors import InvalidInputError, ResourceLimitError
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    bound_ratio_sweep,
    covering_probe,
    geometry_checks,
    identity_checks,
    mc_expected_norm,
    pca_detection,
)
from .lp import (
    PExponent,
    convexity_gap,
    half_ball_indicator,
    linear_maximizer,
    lp_norm,
    sample_ball,
    sample_ball_batch,
)
from .models import (
    Hypergraph,
    MatchingFamily,
    ModelSpec,
    adjacency_tensor,
    complete_hypergraph,
    delta_j,
    delta_vector,
    iid_star_sum,
    iid_symmetric,
    lower_bound_series,
    lower_bound_witness,
    matching_series,
    nonhomogeneous,
    pca_observation,
    rank1_series,
)
from .norms import (
    NormEstimate,
    SolverConfig,
    best_available_norm,
    grid_oracle,
    injective_norm,
    l1_injective_exact,
    spectral_exact,
    symmetric_injective_norm,
)
from .seeds import generator, mix
from .tensor import (
    MAX_ENTRIES,
    Tensor,
    TensorSeries,
    apply_form,
    contract,
    frobenius,
    hadamard,
    inner,
    is_diagonal_free,
    is_symmetric,
    outer,
    star,
    sym_embed,
    symmetrize,
    vector_piece,
)
from .variance import (
    VarianceProfile,
    natural_distance,
    sigma_frobenius_upper,
    sigma_q_direct,
    sigma_q_sup,
    star_sum,
    type2_variance,
    variance_profile,
)

__version__ = "0.1.0"
