"""Exception hierarchy shared by all pvforge modules."""


class PvforgeError(Exception):
    """Base class for every error raised by this package."""


class ZeroDenominatorError(PvforgeError, ZeroDivisionError):
    """A denominator is identically zero."""


class ExprSyntaxError(PvforgeError, ValueError):
    def __init__(self, message, text, pos):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos} in {text!r}")


class UnknownVariableError(PvforgeError, ValueError):
    def __init__(self, name, known):
        self.name = name
        self.known = tuple(known)
        super().__init__(f"unknown variable {name!r} (known: {', '.join(self.known) or 'none'})")


class TowerError(PvforgeError, ValueError):
    """A differential tower or system presentation violates its invariants."""


class OrderMismatchError(PvforgeError, ValueError):
    pass


class SingularMatrixError(PvforgeError, ArithmeticError):
    pass


class FundamentalMatrixError(PvforgeError):
    """Raised when an operation needs a spec whose fundamental checks fail."""

    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("fundamental-matrix checks failed: " + diagnostics.summary())


class MembershipError(PvforgeError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"B matrix has a coefficient outside the base field: {witness}")


class InstabilityError(PvforgeError):
    """Solution spaces at two truncation orders disagree."""


class SpecFormatError(PvforgeError, ValueError):
    def __init__(self, message, path=None, line=None, expression=None):
        self.path = path
        self.line = line
        self.expression = expression
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        if expression is not None:
            message = f"{message} (expression {expression!r})"
        super().__init__(where + message)
