"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where a quantity is real/defined."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConstraintError(ValueError):
    """Family parameters violate the integrability constraint."""


class SingularityError(RuntimeError):
    """Numerical integration hit a singular configuration."""

    def __init__(self, message, t_reached):
        super().__init__(f"{message} (integration reached t={t_reached:.12g})")
        self.t_reached = t_reached


class DegeneracyError(ValueError):
    """Two supposedly independent solutions have a vanishing Wronskian."""


class QuadratureError(RuntimeError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class NonUnimodalError(RuntimeError):
    """The coarse scan could not isolate an interior minimum."""

    def __init__(self, message, scan):
        super().__init__(message)
        self.scan = scan


class ConfigError(ValueError):
    """Experiment configuration failed validation; ``path`` names the field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
