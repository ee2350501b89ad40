"""Exception types raised by jacobispec."""


class JacobiSpecError(Exception):
    """Base class for library errors."""


class ResolutionError(JacobiSpecError, ValueError):
    """Quadrature too coarse for the requested number of modes."""


class TruncationError(JacobiSpecError, RuntimeError):
    """A series or integral could not be truncated within its budget."""


class ConvergenceError(JacobiSpecError, RuntimeError):
    """An iterative solver failed to converge."""


class ShiftError(JacobiSpecError, ValueError):
    """Spectral shift ``a`` not below the bottom of the spectrum."""
