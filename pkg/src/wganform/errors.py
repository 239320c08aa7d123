"""Package-wide error types."""


class NumericsError(RuntimeError):
    """A numerical routine failed to reach its accuracy contract."""


class QuadratureError(NumericsError):
    """Adaptive integration stagnated before converging."""
