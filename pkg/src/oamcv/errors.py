"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class InputError(ToolkitError, ValueError):
    """Invalid argument, state, or configuration value."""


class UnphysicalStateError(InputError):
    """State parameters that no physical Gaussian state can have."""


class NumericalError(ToolkitError, ArithmeticError):
    """Numerical degeneracy or disagreement beyond tolerance."""


class ResolutionError(InputError):
    """Grid too coarse to resolve the requested field structure."""
