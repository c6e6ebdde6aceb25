"""Exception hierarchy shared across the package."""


class UDBError(Exception):
    """Base class for all package errors."""


class DomainError(UDBError, ValueError):
    """An argument lies outside the domain of an operation."""


class CapacityError(UDBError):
    """An exhaustive computation was asked to exceed its budget."""


class CertificateFormatError(UDBError, ValueError):
    """A certificate or point-set file could not be parsed."""


class VerificationError(UDBError):
    """A verification stage failed.

    ``stage`` names the failing stage and ``t`` the offending argument,
    when there is one.
    """

    def __init__(self, stage, message, t=None):
        self.stage = stage
        self.t = t
        where = f" at t={t:.9g}" if t is not None else ""
        super().__init__(f"[{stage}]{where} {message}")


class InfeasibleError(UDBError):
    """No admissible value exists (e.g. the bound equation has no positive root)."""


class ConvergenceError(UDBError):
    """An iterative procedure did not converge within its step budget."""


class ExtractionError(UDBError):
    """Dual multipliers violate the sign conventions of the linear program."""


class AuditError(UDBError):
    """A construction failed its distance audit."""

    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)
