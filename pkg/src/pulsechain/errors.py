"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input: parameter invariant violated, malformed config/trace, precondition failed."""


class FitError(RuntimeError):
    """Numerical failure: data rejected by the exponential fitter or a degenerate result."""


class LeakageWarning(UserWarning):
    """Signal energy outside the guaranteed band of a frequency-domain filter."""
