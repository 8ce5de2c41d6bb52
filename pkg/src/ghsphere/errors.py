"""Exception hierarchy shared by every module of the package."""


class GHSphereError(Exception):
    """Base class for all package errors."""


class DomainError(GHSphereError, ValueError):
    """An input lies outside the domain of an operation."""


class DimensionMismatchError(DomainError):
    pass


class DegenerateGeodesicError(DomainError):
    """The geodesic between two points is not unique (antipodal pair)."""


class PoleProjectionError(DomainError):
    """Projection to the equator is undefined at the poles."""


class SingularityError(DomainError):
    pass


class NotInDomainError(DomainError):
    """A point lies on a cell boundary or at a pole that a construction excludes."""


class SamplingStarvationError(GHSphereError):
    pass


class NumericIntegrityError(GHSphereError, ArithmeticError):
    """An arccos/sqrt argument left its documented clamp window."""


class ConfigurationError(GHSphereError, ValueError):
    """A grid job is inconsistent with its continuity budget."""


class BudgetInfeasibleError(ConfigurationError):
    def __init__(self, message, min_margin):
        super().__init__(message)
        self.min_margin = min_margin
