"""Exception types shared across the package."""


class MembeamError(Exception):
    """Base class for all package-specific errors."""


class InputError(MembeamError, ValueError):
    """Malformed or inconsistent user input (grids, configs, vectors)."""


class DomainError(MembeamError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ResolutionError(MembeamError, ValueError):
    """Tabulated data too coarse for the requested operation."""


class SingularityError(MembeamError, ArithmeticError):
    """Evaluation requested at a pole or other singular point."""


class HypothesisError(MembeamError, RuntimeError):
    """A kernel hypothesis required by the operation does not hold."""


class NumericError(MembeamError, RuntimeError):
    """A numerical routine failed to converge or produced NaNs."""
