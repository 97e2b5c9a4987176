"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalFailure(ArithmeticError):
    """An iterative routine failed to reach its tolerance.

    ``partial`` carries the best value available when the routine gave up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InvalidConfig(ValueError):
    """An experiment config failed validation.

    ``errors`` lists ``(field_path, message)`` pairs for every violation.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{path}: {msg}" for path, msg in self.errors)
        super().__init__(f"invalid config: {lines}")
