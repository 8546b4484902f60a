"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """Inputs violate a documented precondition (sample size, delta, range)."""


class ArityError(PreconditionError):
    """A kernel received the wrong number of points."""


class KernelRangeError(ValueError):
    """A kernel produced a value outside its declared range.

    This signals a misdeclared kernel; every bound downstream would be invalid,
    so it is never clamped.
    """


class EnumerationCapError(PreconditionError):
    """Exact enumeration would exceed the configured number of combinations."""


class VacuousBoundError(PreconditionError):
    """delta >= A, so log(A / delta) <= 0 and the reversed bound says nothing."""


class BudgetError(PreconditionError):
    """Union-bound component budgets do not add up to delta."""
