"""Exception types raised across the package."""


class PersuadeNetError(Exception):
    """Base class for all package errors."""


class CapExceeded(PersuadeNetError):
    """An exhaustive enumeration was requested on a graph above the size cap."""

    def __init__(self, n, cap, what="enumeration"):
        super().__init__(f"{what} cap exceeded: graph has n={n} nodes, cap is {cap}")
        self.n = n
        self.cap = cap


class SingularAfterReduction(PersuadeNetError):
    """(A+I) stays singular after merging closed-neighbourhood twins."""


class BracketFailure(PersuadeNetError):
    """Marginal mixed benefit never dropped below the cost within the bracket cap."""


class InteriorRequired(PersuadeNetError):
    """A quantity only defined for a strictly positive unilateral effort was requested at e* = 0."""


class DegenerateDerivative(PersuadeNetError):
    """A risk-aversion style ratio has a vanishing denominator."""


class NotMaximalIndependent(PersuadeNetError):
    pass


class NotAnEquilibrium(PersuadeNetError):
    pass


class PriorOnBoundary(PersuadeNetError):
    """The prior is 0 or 1, so no signal can move beliefs."""


class InvalidBenefit(PersuadeNetError, ValueError):
    """Benefit functions violate the monotone/concave/ordered/saturating invariants."""


class ConfigError(PersuadeNetError, ValueError):
    pass
