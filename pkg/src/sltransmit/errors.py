"""Exception hierarchy.

Every error carries a short ``code`` (used verbatim by the CLI error objects)
and a ``context`` dict with the offending values.
"""


class SLError(Exception):
    code = "SLError"
    exit_code = 3

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def as_dict(self):
        return {"code": self.code, "message": self.message, "context": self.context}


class InvalidProblem(SLError, ValueError):
    """Base class for rejected problem data (CLI exit status 2)."""

    code = "InvalidProblem"
    exit_code = 2


class DegenerateLeftBC(InvalidProblem):
    code = "DegenerateLeftBC"


class NonPositiveDeterminant(InvalidProblem):
    code = "NonPositiveDeterminant"


class BadInterfaces(InvalidProblem):
    code = "BadInterfaces"


class ZeroLeadingCoefficient(InvalidProblem):
    code = "ZeroLeadingCoefficient"


class NonFiniteCoefficient(InvalidProblem):
    code = "NonFiniteCoefficient"


class StepFailure(SLError, ArithmeticError):
    """The adaptive integrator could not meet its tolerance above the minimum step."""

    code = "StepFailure"


class DegenerateTrace(SLError, ArithmeticError):
    code = "DegenerateTrace"


class GridMismatch(SLError, ValueError):
    code = "GridMismatch"
    exit_code = 2


class NotOrthonormal(SLError, ArithmeticError):
    code = "NotOrthonormal"


class NotAnEigenvalue(SLError, ValueError):
    code = "NotAnEigenvalue"
    exit_code = 4


class EtaIsEigenvalue(SLError, ValueError):
    code = "EtaIsEigenvalue"
    exit_code = 4


class ScanExhausted(SLError, RuntimeError):
    """Raised when the scan ceiling is reached early; ``found`` holds what was located."""

    code = "ScanExhausted"
    exit_code = 4

    def __init__(self, message, found=(), **context):
        super().__init__(message, **context)
        self.found = list(found)
