"""Exception hierarchy shared by all modules."""


class SphallError(Exception):
    """Base class for every error raised by this package."""


class PoleError(SphallError, ArithmeticError):
    """Evaluation requested at a pole.

    ``where`` names the offending factor or point so contour code can tell a
    pole apart from an overflow.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class KernelZeroDivisionError(SphallError, ZeroDivisionError):
    """A denominator factor vanished (e.g. a zero of zeta*(s+1) inside Phi)."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class DomainError(SphallError, ValueError):
    pass


class ConvergenceError(SphallError, ArithmeticError):
    pass


class BudgetError(SphallError, RuntimeError):
    pass


class NonPrimitiveError(SphallError, ValueError):
    pass


class NonSurjectiveError(SphallError, ValueError):
    pass


class NotCofaceError(SphallError, ValueError):
    pass


class IllConditionedError(SphallError, ArithmeticError):
    pass


class RenumberError(SphallError, ValueError):
    pass
