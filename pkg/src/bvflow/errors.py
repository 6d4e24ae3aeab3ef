"""Exception types shared across the package."""


class BVFlowError(Exception):
    """Base class for all package errors."""


class ConfigurationError(BVFlowError):
    """Operands disagree on space, truncation degree or hbar window."""


class ConventionError(BVFlowError):
    """An operation was handed data violating a pinned convention (e.g. an even BV kernel)."""


class InputError(BVFlowError):
    """Malformed user input (bad monomial, arity mismatch, unknown generator...)."""


class TruncationError(BVFlowError):
    """The requested truncation degree cannot hold the requested object."""


class ResourceLimitError(BVFlowError):
    """A bound exceeds the hard limits of the enumeration machinery."""


class ValidationError(BVFlowError):
    """A structured input (model file, Frobenius table) failed its consistency checks."""


class NonIsolatedCriticalLocus(BVFlowError):
    """The Jacobian ideal is not zero-dimensional: Crit(W) is not finite."""


class NotInIdeal(BVFlowError):
    """Ideal membership failed: the remainder on division is nonzero."""


class ObstructionNonzero(BVFlowError):
    """The quantum-correction linear system is inconsistent.

    The unreachable part of the right-hand side is kept on the ``witness``
    attribute as a functional.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StatisticalError(BVFlowError):
    """A sampled estimate did not reach the requested variance threshold."""

    def __init__(self, message, estimate=None, error_bar=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bar = error_bar
