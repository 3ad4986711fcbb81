"""The p/r/Z linear algebra of circuits."""

from .composition import (
    coarse_grain,
    sequential_compose,
    tensor_all,
    tensor_compose,
    wire_permutation_matrix,
)
from .compression import FiducialCompression, compress_to_fiducials
from .evaluation import (
    coarse_assignment,
    evaluate_all,
    evaluate_circuit,
    fragment_transfer_matrix,
    operation_transfer_matrix,
    outcome_assignments,
)
from .states import (
    LocalNonlocalSplit,
    StateClass,
    are_parallel,
    classify_state,
    conditional_state,
    mix_states,
    normalize,
    reduced_state,
    split_local_nonlocal,
    trace_probability,
)
from .theorems import (
    check_commutation,
    check_disjoint_independence,
    check_factorization,
    check_parallel_closure,
    check_uncorrelatability,
)
from .vectors import (
    EffectVector,
    FragmentLabel,
    OutcomeAssignment,
    StateVector,
    TransferMatrix,
    parse_assignment,
)

__all__ = [
    "EffectVector",
    "FiducialCompression",
    "FragmentLabel",
    "LocalNonlocalSplit",
    "OutcomeAssignment",
    "StateClass",
    "StateVector",
    "TransferMatrix",
    "are_parallel",
    "check_commutation",
    "check_disjoint_independence",
    "check_factorization",
    "check_parallel_closure",
    "check_uncorrelatability",
    "classify_state",
    "coarse_assignment",
    "coarse_grain",
    "compress_to_fiducials",
    "conditional_state",
    "evaluate_all",
    "evaluate_circuit",
    "fragment_transfer_matrix",
    "mix_states",
    "normalize",
    "operation_transfer_matrix",
    "outcome_assignments",
    "parse_assignment",
    "reduced_state",
    "sequential_compose",
    "split_local_nonlocal",
    "tensor_all",
    "tensor_compose",
    "trace_probability",
    "wire_permutation_matrix",
]
