"""Exception hierarchy shared by all modules."""


class MrpiError(Exception):
    """Base class for every error raised by mrpibound."""


class DimensionMismatch(MrpiError, ValueError):
    pass


class SingularMatrix(MrpiError, ArithmeticError):
    pass


class NotPositiveDefinite(MrpiError, ValueError):
    pass


class NoConvergence(MrpiError, RuntimeError):
    pass


class NotSchurStable(MrpiError, ValueError):
    pass


class NotStabilizable(MrpiError, ValueError):
    pass


class Infeasible(MrpiError, ValueError):
    pass


class CapacityExceeded(MrpiError, MemoryError):
    pass


class EmptyDifference(MrpiError, ValueError):
    pass


class NotNested(MrpiError, ValueError):
    pass


class InvalidContraction(MrpiError, ValueError):
    pass


class InvalidTolerance(MrpiError, ValueError):
    pass


class NotContractive(MrpiError, ValueError):
    """The induced norm of the system matrix is not below one in the chosen norm."""


class HorizonExceeded(MrpiError, IndexError):
    pass


class DegenerateCurve(MrpiError, ValueError):
    pass


class InfeasibleTightening(EmptyDifference):
    """Constraint tightening (or the nominal problem built on it) has no solution."""
