"""Exception types raised by the sampler and its helpers."""


class LinearESSError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(LinearESSError, ValueError):
    pass


class InvalidConstraint(LinearESSError, ValueError):
    """A zero row ``a_i = 0`` paired with ``b_i < 0``: the domain is empty."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"constraint {index} has a zero row and negative offset")


class InfeasibleCurrentPoint(LinearESSError):
    """The current iterate violates a constraint by more than the tolerance."""


class InfeasibleStart(LinearESSError, ValueError):
    """The chain start is not strictly inside the polytope."""

    def __init__(self, index, residual, message=None):
        self.index = index
        self.residual = residual
        super().__init__(
            message or f"start point violates strict feasibility at constraint {index} "
            f"(residual {residual:.6g})"
        )


class DuplicateAngles(LinearESSError, ValueError):
    pass


class EmptyIntervalSet(LinearESSError, ValueError):
    pass


class UnderflowingMass(LinearESSError, ArithmeticError):
    pass


class AcceptanceTooLow(LinearESSError, RuntimeError):
    pass
