"""Exception types shared across the package."""


class KernelError(ValueError):
    """Inadmissible kernel family, exponent or profile data."""


class QuadratureConvergenceError(RuntimeError):
    """Two successive quadrature refinements disagree beyond tolerance."""


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""
