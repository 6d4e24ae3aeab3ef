"""bvflow: effective BV quantization machinery at desk scale."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BVFlowError,
    ConfigurationError,
    ConventionError,
    InputError,
    NonIsolatedCriticalLocus,
    NotInIdeal,
    ObstructionNonzero,
    ResourceLimitError,
    StatisticalError,
    TruncationError,
    ValidationError,
)
from .superalg import (  # noqa: F401
    Derivation,
    Functional,
    GradedSpace,
    Kernel,
    apply_derivation,
    bv_bracket,
    bv_laplacian,
    contract,
    exp_functional,
    lagrangian_restrict,
    mul,
)
