"""Exception hierarchy shared by every module."""


class RSBMError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RSBMError, ValueError):
    """Invalid parameters or malformed input data."""


class SamplingError(RSBMError, RuntimeError):
    """A rejection sampler ran out of attempts."""

    def __init__(self, message, attempts):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class ConvergenceError(RSBMError, RuntimeError):
    """Power iteration did not reach the requested residual."""

    def __init__(self, message, best_residual, iterations):
        super().__init__(
            f"{message}: best residual {best_residual:.3e} after {iterations} iterations"
        )
        self.best_residual = best_residual
        self.iterations = iterations


class BudgetError(RSBMError, RuntimeError):
    """An exhaustive computation would exceed its work budget."""

    def __init__(self, message, estimated_cost, budget):
        super().__init__(f"{message}: estimated cost {estimated_cost:.3g} exceeds budget {budget:.3g}")
        self.estimated_cost = estimated_cost
        self.budget = budget


class ParseError(ValidationError):
    """A graph or label file could not be parsed."""

    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
