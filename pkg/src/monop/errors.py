"""Exception hierarchy shared by the library and the command line."""


class MonopError(Exception):
    """Base class for all errors raised by this package."""


class ExprError(MonopError, ValueError):
    """Malformed expression text."""


class ExprSyntaxError(ExprError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifierError(ExprError):
    def __init__(self, name, position):
        super().__init__(f"unknown identifier {name!r} (at position {position})")
        self.name = name
        self.position = position


class WrongVariableError(ExprError):
    def __init__(self, name, expected, position):
        super().__init__(
            f"expression uses variable {name!r} but the declared variable is "
            f"{expected!r} (at position {position})"
        )
        self.name = name
        self.expected = expected
        self.position = position


class EvaluationError(MonopError, ArithmeticError):
    """Evaluation of an expression failed."""


class PoleError(EvaluationError):
    """A denominator vanished at the evaluation point."""

    def __init__(self, point):
        super().__init__(f"pole at evaluation point {point!r}")
        self.point = point


class EvaluationOverflow(EvaluationError):
    """The value is not representable although no denominator vanished."""


class NotExactError(EvaluationError):
    """The expression cannot be evaluated in exact rational arithmetic."""


class SpecError(MonopError, ValueError):
    """Invalid monomial-operator specification."""


class NotSelfMapError(MonopError):
    """A sampled symbol left the closed right half-plane."""

    def __init__(self, point):
        super().__init__(f"symbol maps a boundary point to {point!r}, outside the closed right half-plane")
        self.point = point


class OracleCapError(MonopError, ValueError):
    """Requested truncation size exceeds the configured cap."""
