"""Exception hierarchy shared by every module.

CLI exit codes are attached to the classes so the front end can map an
exception to a status without a lookup table.
"""


class FibsumError(Exception):
    exit_code = 1


class ZeroToNegativePower(FibsumError, ZeroDivisionError):
    exit_code = 3


class InternalParity(FibsumError, AssertionError):
    """A bracket that must be even was odd; always a bug, never user input."""


class VanishingDenominator(FibsumError):
    exit_code = 3

    def __init__(self, which, message=None):
        self.which = which
        super().__init__(message or f"{which} vanishes at this point")


class UnsupportedLimit(FibsumError):
    exit_code = 3


class DivergentSeries(FibsumError):
    exit_code = 3


class Indeterminate(DivergentSeries):
    """Convergence could not be decided inside the guard band."""


class GuardViolated(FibsumError):
    exit_code = 3


class UnknownRecord(FibsumError, KeyError):
    exit_code = 2

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown record"


class ExprSyntaxError(FibsumError, SyntaxError):
    exit_code = 2

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = frozenset(expected)
        text = f"{message} at position {position}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(text)


class EvalError(FibsumError):
    exit_code = 3


class UnboundSymbol(EvalError):
    exit_code = 2

    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound symbol {name!r}")


class SchemaError(FibsumError):
    exit_code = 2

    def __init__(self, record_id, message):
        self.record_id = record_id
        super().__init__(f"record {record_id}: {message}")
