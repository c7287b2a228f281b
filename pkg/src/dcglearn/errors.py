"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """Bad shapes, out-of-range grades, malformed permutations."""


class DomainError(ValueError):
    """A numeric input lies outside the domain of the operation."""


class PreconditionError(ValueError):
    """An input violates a documented precondition (e.g. incompatible gains)."""


class CapacityError(ValueError):
    """The requested enumeration is too large to run exhaustively."""


class DegenerateInputError(ValueError):
    """The input has no meaningful answer (zero matrix, zero vector)."""


class ConvergenceError(RuntimeError):
    """The solver hit its iteration budget before meeting the tolerance."""

    def __init__(self, message, objective=None, iterations=None):
        super().__init__(message)
        self.objective = objective
        self.iterations = iterations
