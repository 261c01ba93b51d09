"""Multipartite concurrence of pure states from two-copy measurements."""
from ._accel import BACKEND
from .concurrence import (
    ConcurrenceResult,
    build_dense_A,
    build_dense_A_tilde,
    concurrence,
    concurrence_reduced,
    concurrence_single_observable,
    concurrence_two_copy,
    enumerate_even_sign_strings,
    p_plus_exact,
)
from .hilbert import (
    DensityMatrix,
    DimensionCapError,
    PureState,
    SignString,
    SubsystemDims,
    TwoCopyOperator,
    apply_sign_string_projector,
    local_projector,
    partial_trace,
    purity,
    swap_operator,
    tensor_product,
)
from .sampling import (
    OutcomeDistribution,
    SampleSummary,
    estimate_mixedness,
    mixedness_exact,
    outcome_distribution,
    sample_shots,
)
from .states import depolarized, ghz, product_state, random_pure, w_state

__version__ = "0.1.0"
