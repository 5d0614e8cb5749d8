"""Exception types raised by the msm solvers."""


class MsmError(Exception):
    """Base class for all library errors."""


class DomainError(MsmError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(MsmError, ValueError):
    """A documented precondition (step size, grid, index range) was violated."""


class NoRoots(MsmError):
    pass


class SingularHierarchy(MsmError):
    """The linear operator of a perturbation hierarchy vanishes (non-simple root)."""


class ConvergenceFailure(MsmError):
    pass


class StiffnessFailure(MsmError):
    """Adaptive step size collapsed below the representable minimum."""


class DivergenceFailure(MsmError):
    """A solution blew up or produced non-finite values."""


class FitFailure(MsmError):
    pass


class BranchFailure(MsmError):
    """No dispersion-relation root on the requested branch / window."""


class BenchFailure(MsmError):
    pass


class ConfigError(MsmError, ValueError):
    pass
