"""Exception hierarchy shared across the package."""


class HflError(Exception):
    """Base class for all package errors."""


class ParseError(HflError):
    def __init__(self, message, span=None, expected=None):
        self.span = span
        self.expected = frozenset(expected or ())
        detail = message
        if span is not None:
            detail += f" at {span.start}..{span.end}"
        if self.expected:
            detail += " (expected: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class TypeError_(HflError):
    """Type inference failure; carries the offending subformula."""

    def __init__(self, message, formula=None):
        self.formula = formula
        super().__init__(message)


class VarianceError(TypeError_):
    pass


class UnboundVariableError(HflError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class LtsFormatError(HflError):
    pass


class AtmFormatError(HflError):
    pass


class SpaceBoundError(HflError):
    """Turing machine head left the allotted tape during simulation."""


class BudgetError(HflError):
    """Base class for configured-resource refusals."""


class BoundBudgetError(BudgetError):
    """A quantitative bound would exceed the big-integer digit budget.

    Carries a symbolic rendering of the tower expression instead of the value.
    """

    def __init__(self, symbolic):
        self.symbolic = symbolic
        super().__init__(f"bound astronomically large: {symbolic}")


class EnumLimitError(BudgetError):
    """Lattice enumeration refused; carries exact or symbolic cardinality."""

    def __init__(self, cardinality, limit):
        self.cardinality = cardinality
        self.limit = limit
        super().__init__(f"lattice has {cardinality} elements, over limit {limit}")


class UnfoldBudgetError(BudgetError):
    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(
            f"fixpoint elimination needs {required} unfoldings, over budget {budget}"
        )


class GameLimitError(BudgetError):
    def __init__(self, actual, limit, estimate):
        self.actual = actual
        self.limit = limit
        self.estimate = estimate
        super().__init__(
            f"game grew past {limit} (at {actual}); closed-form estimate {estimate}"
        )


class IterationCapError(HflError):
    """Fixpoint iteration exceeded its cap; signals a non-convergence bug."""


class InternalError(HflError):
    """An invariant the implementation relies on was violated."""
