"""Exception hierarchy shared across the package."""


class KernelRegimesError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(KernelRegimesError):
    """Operands have incompatible shapes or dimensions."""


class NotPositiveDefinite(KernelRegimesError):
    """A Cholesky factorization failed.

    ``pivot`` is the zero-based index of the first failing pivot when the
    backend reports one, else ``None``.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class NoConvergence(KernelRegimesError):
    """An iterative eigenvalue backend exhausted its budget."""


class SingularBorder(KernelRegimesError):
    """A bordered-inverse update hit a (near-)zero Schur complement."""


class SingularSystem(KernelRegimesError):
    """A linear system is singular even after the one-shot jitter retry."""


class DomainViolation(KernelRegimesError):
    """A point lies outside the declared input domain."""


class UnsupportedFamily(KernelRegimesError):
    """The requested operation is undefined for this kernel family."""


class CapacityExceeded(KernelRegimesError):
    """A materialization would exceed the documented size cap.

    ``count`` carries the exact element count that was refused.
    """

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class TruncationTooSmall(KernelRegimesError):
    """A lattice truncation cannot certify the requested tail accuracy."""


class QuadratureMismatch(KernelRegimesError):
    """The quadrature rule is incompatible with the domain."""


class InvalidRegime(KernelRegimesError):
    """Inputs violate the regime assumptions of a formula."""


class HypothesisViolated(KernelRegimesError):
    """Inputs fall outside the hypotheses of a closed-form bound."""


class NonPositiveInput(KernelRegimesError):
    """A strictly positive quantity was zero or negative."""


class BudgetExceeded(KernelRegimesError):
    """A wall-clock or cell budget ran out; partial results were kept.

    ``partial`` holds whatever rows were completed before the budget hit.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(KernelRegimesError):
    """A run configuration failed validation."""
