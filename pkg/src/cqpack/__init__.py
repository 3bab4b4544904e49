"""Classical-quantum channel coding by pinched hypothesis tests and greedy packing."""
from .channel import (
    CqChannel,
    LiftedStatePair,
    codeword_state,
    distribution,
    lift,
    load_channel,
    mixture_state,
    product_distribution,
)
from .errors import (
    CqpackError,
    EigensolverError,
    InvariantViolation,
    NegativeEigenvalueError,
    NotConvergedError,
    NumericalInconsistencyError,
    ResourceLimitError,
    SupportError,
    ValidationError,
)
from .hyptest import (
    TestReport,
    alpha,
    beta,
    delta_n,
    hypothesis_report,
    oh_bounds,
    per_codeword_test,
    pinched_test,
)
from .info import (
    CapacityResult,
    capacity,
    measured_relative_entropy,
    mutual_information,
    psi,
    relative_entropy,
    von_neumann_entropy,
)
from .linop import (
    SpectralDecomposition,
    direct_sum,
    hs_inner,
    kron,
    kron_power,
    matrix_sqrt,
    pinch,
    proj_pos,
    spectral_decompose,
    tensor_power_decomposition,
    trace_norm,
)
from .packing import (
    Code,
    PackingParams,
    PackingReport,
    build_block_code,
    candidate_set,
    evaluate_code,
    gentle_check,
    greedy_pack,
    verify_packing,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityResult",
    "Code",
    "CqChannel",
    "CqpackError",
    "EigensolverError",
    "InvariantViolation",
    "LiftedStatePair",
    "NegativeEigenvalueError",
    "NotConvergedError",
    "NumericalInconsistencyError",
    "PackingParams",
    "PackingReport",
    "ResourceLimitError",
    "SpectralDecomposition",
    "SupportError",
    "TestReport",
    "ValidationError",
    "alpha",
    "beta",
    "build_block_code",
    "candidate_set",
    "capacity",
    "codeword_state",
    "delta_n",
    "direct_sum",
    "distribution",
    "evaluate_code",
    "gentle_check",
    "greedy_pack",
    "hs_inner",
    "hypothesis_report",
    "kron",
    "kron_power",
    "lift",
    "load_channel",
    "matrix_sqrt",
    "measured_relative_entropy",
    "mixture_state",
    "mutual_information",
    "oh_bounds",
    "per_codeword_test",
    "pinch",
    "pinched_test",
    "product_distribution",
    "proj_pos",
    "psi",
    "relative_entropy",
    "spectral_decompose",
    "tensor_power_decomposition",
    "trace_norm",
    "verify_packing",
    "von_neumann_entropy",
]
