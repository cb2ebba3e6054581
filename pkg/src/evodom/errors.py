"""Exception types shared across the package."""


class EvodomError(Exception):
    """Base class for all library errors."""


class PulseDomainError(EvodomError, ValueError):
    """Harvest map evaluated at a negative density."""


class EnvelopeUndefinedError(EvodomError):
    """Monotone envelopes requested for a subcritical problem.

    The density bound for the lower envelope is the minimum over one
    period of the minimal positive periodic orbit of the capped-pulse
    ODE; that orbit only exists when the reproduction index exceeds 1.
    """


class QuadratureError(EvodomError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class NoPositivePeriodicSolutionError(EvodomError):
    """Pulsed logistic ODE has no positive periodic orbit.

    Requires exp(alpha*T) * g'(0) > 1.
    """


class InvalidInitialConditionError(EvodomError, ValueError):
    """Initial field is negative somewhere on the grid."""


class InstabilityError(EvodomError):
    """Time stepping produced non-finite values."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class IterationOrderBrokenError(EvodomError):
    """Bracketing iterates lost their pointwise ordering.

    Indicates a scheme bug (the continuous iteration is provably
    monotone), so it is raised rather than tolerated.
    """


class InvalidLowerSolutionSpecError(EvodomError, ValueError):
    """Lower-solution amplitude outside its admissible range."""


class PeriodMapConvergenceError(EvodomError):
    """Period-map iteration did not converge within the period cap."""

    def __init__(self, message, residual=None, periods=None):
        super().__init__(message)
        self.residual = residual
        self.periods = periods


class ConfigError(EvodomError, ValueError):
    """Scenario configuration is malformed.

    Carries the offending key and the 1-based line number when known.
    """

    def __init__(self, message, key=None, line=None):
        loc = []
        if key is not None:
            loc.append(f"key {key!r}")
        if line is not None:
            loc.append(f"line {line}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.key = key
        self.line = line


class SweepPathError(EvodomError, ValueError):
    """Unknown sweep parameter path."""
