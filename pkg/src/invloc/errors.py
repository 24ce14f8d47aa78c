"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    pass


class DegenerateInstanceError(ValueError):
    """The instance has zero total weight, so every point is a median."""


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SolverFailureError(RuntimeError):
    """The LP engine gave up (pivot cap) or returned a status the caller cannot use."""


class SubproblemInfeasibleError(RuntimeError):
    pass


class SubproblemFailureError(RuntimeError):
    def __init__(self, message, best_residual=float("inf")):
        super().__init__(message)
        self.best_residual = best_residual
