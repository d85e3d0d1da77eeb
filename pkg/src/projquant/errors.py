"""Exception types raised by the library.

Every class maps to exactly one CLI exit code (see ``projquant.cli``).
"""


class ProjquantError(Exception):
    """Base class for library errors."""


class UsageError(ProjquantError, ValueError):
    """Mismatched rings, base tables, indices out of range and similar misuse."""


class ResonanceError(ProjquantError, ZeroDivisionError):
    """A coefficient denominator vanished.

    ``witness`` is the ``(k, m)`` pair (homogeneous degree, series order) at
    which the failing coefficient was requested.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        if witness is not None:
            # integral degrees are reported as plain ints
            witness = tuple(int(v) if getattr(v, "denominator", 1) == 1 else v for v in witness)
        self.witness = witness


class NonterminatingSeries(ProjquantError):
    """The divergence operator did not annihilate a part within the step limit."""

    def __init__(self, message, degree=None, steps=None):
        super().__init__(message)
        self.degree = degree
        self.steps = steps


class NotOperatorSymbol(ProjquantError, ValueError):
    """A symbol with non-polynomial dependence on the fiber variables."""


class DegenerateCurvatureError(ProjquantError, ValueError):
    """The curvature constant of the geodesic example is undefined."""


class ParseError(ProjquantError, ValueError):
    """Syntax or elaboration error in the expression language.

    ``column`` is 1-based, or ``None`` for errors not tied to a position.
    """

    def __init__(self, message, column=None):
        if column is not None:
            message = f"column {column}: {message}"
        super().__init__(message)
        self.column = column
