"""Exception classes raised by fhspec."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DimensionError(ValueError):
    """Operand shapes do not match."""


class HypothesisError(ValueError):
    """Inputs are valid but violate the hypothesis of an asymptotic formula."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""


class ConvergenceError(RuntimeError):
    """A numerical method did not reach its tolerance.

    ``achieved`` holds the best error estimate reached and ``estimate`` the
    corresponding value, so callers can still inspect the result.
    """

    def __init__(self, msg, achieved=None, estimate=None):
        super().__init__(msg)
        self.achieved = achieved
        self.estimate = estimate
