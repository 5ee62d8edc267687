"""Exception hierarchy shared by all ksobs modules."""


class KSObsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KSObsError, ValueError):
    """An argument lies outside the domain of an operation."""


class AliasingError(DomainError):
    """The quadrature grid is too coarse for the requested mode count."""


class RangeError(KSObsError, OverflowError):
    """A result would not fit the representable range."""


class ConstructionError(KSObsError):
    """A sensor-dependent matrix could not be built (singular or ill-conditioned)."""


class StepSizeError(KSObsError):
    """The implicit factor of the time stepper vanished."""


class BlowUpError(KSObsError):
    """A trajectory became nonfinite or exceeded the blow-up threshold.

    ``series`` holds the records collected up to the last healthy step.
    """

    def __init__(self, time, norm, series=None):
        self.time = time
        self.norm = norm
        self.series = series
        super().__init__(f"blow-up detected at t={time:.6g} (max |coefficient| = {norm:.6g})")


class ConfigError(KSObsError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
