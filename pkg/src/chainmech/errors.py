"""Exception types shared across the package."""


class InstanceError(ValueError):
    """An instance, report or path violates its structural invariants."""


class ExactSearchBudgetError(RuntimeError):
    """An exact exponential search was asked to run beyond its configured size limit."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what}: region of {size} nodes exceeds exact-search limit {limit}")
        self.size = size
        self.limit = limit


class PreconditionViolated(ValueError):
    pass


class GeneratorError(RuntimeError):
    """A lower-bound family member failed its own certificate check."""


class InvariantViolation(AssertionError):
    """A mechanism trace contradicts one of the runtime-checkable invariants."""
