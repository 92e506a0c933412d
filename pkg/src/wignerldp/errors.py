"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """An evaluation point collides with an atom of the measure."""


class DivergenceError(ArithmeticError):
    """A requested integral diverges."""


class IterationError(RuntimeError):
    """A fixed-point or root-finding iteration failed to converge."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ConsistencyError(RuntimeError):
    """Two independent evaluation routes disagree beyond tolerance."""


class TiltInfeasibleError(RuntimeError):
    """The exponential-tilt proposal has a non-positive precision.

    This signals a tilt parameter pushed into the supercritical regime,
    where the importance-sampling family degenerates.
    """
