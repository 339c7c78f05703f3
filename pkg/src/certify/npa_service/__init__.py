from .moment_model import (
    MomentModel,
    build_moment_model,
    deterministic_moment_matrix,
    entry_matrix,
    functional_value,
    mermin_functional,
    probability_functional,
    quantum_moment_matrix,
)
from .programs import (
    RelaxationResult,
    certify_max_randomness_sdp,
    extrapolate,
    gamma_distance,
    max_single_expectation_sdp,
)
from .propagation import (
    PropagationContradiction,
    PropagationState,
    block_d,
    gamma_reference,
    propagate_stabilizers,
    reconstruct_gamma,
    schur_submatrix,
)
from .words import BASIS_LABELS, OperatorWord, class_census, reduce_word, word_class

__all__ = [
    "BASIS_LABELS",
    "OperatorWord",
    "reduce_word",
    "word_class",
    "class_census",
    "MomentModel",
    "build_moment_model",
    "entry_matrix",
    "functional_value",
    "mermin_functional",
    "probability_functional",
    "quantum_moment_matrix",
    "deterministic_moment_matrix",
    "PropagationContradiction",
    "PropagationState",
    "propagate_stabilizers",
    "reconstruct_gamma",
    "gamma_reference",
    "schur_submatrix",
    "block_d",
    "RelaxationResult",
    "certify_max_randomness_sdp",
    "max_single_expectation_sdp",
    "extrapolate",
    "gamma_distance",
]
