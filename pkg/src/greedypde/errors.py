"""Exception types shared across the package."""


class GreedyPDEError(Exception):
    """Base class for package-specific failures."""


class ConfigError(GreedyPDEError):
    """Invalid configuration or usage; maps to CLI exit code 2."""


class NumericalError(GreedyPDEError):
    """A numerical invariant broke (unfactorable Gram, corrupted residuals);
    maps to CLI exit code 3."""


class InvalidSelectionError(NumericalError):
    """A functional with nonpositive residual power was handed to extend()."""


class Converged(GreedyPDEError):
    """Selection hit the stop tolerance; normal early termination, not a failure."""
