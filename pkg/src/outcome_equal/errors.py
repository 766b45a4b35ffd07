"""Exception hierarchy.

Every error raised by the library derives from :class:`OutcomeEqualError`, and
the input-validation ones also derive from :class:`ValueError` so callers that
only care about "bad input" can catch that.
"""


class OutcomeEqualError(Exception):
    pass


class SchemaError(OutcomeEqualError, ValueError):
    """Malformed variable schema (duplicate names, bad roles, empty levels...)."""


class BadAssignment(OutcomeEqualError, ValueError):
    pass


class DuplicateCell(OutcomeEqualError, ValueError):
    pass


class NegativeMass(OutcomeEqualError, ValueError):
    pass


class NotNormalized(OutcomeEqualError, ValueError):
    pass


class EmptyKeepSet(OutcomeEqualError, ValueError):
    pass


class OverlappingAxes(OutcomeEqualError, ValueError):
    pass


class SameAxis(OutcomeEqualError, ValueError):
    pass


class SchemaMismatch(OutcomeEqualError, ValueError):
    pass


class InfiniteDivergence(OutcomeEqualError, ArithmeticError):
    """The first argument puts mass where the second has none."""


class Infeasible(OutcomeEqualError):
    """Structural zeros make the independence constraint unsatisfiable.

    The offending pairs are available as ``err.report``.
    """

    def __init__(self, report, message=None):
        self.report = report
        if message is None:
            pairs = ", ".join(
                f"({p.outcome}, {p.protected_label})" for p in report.infeasible_pairs
            )
            message = f"independence constraint cannot be met; blocked pairs: {pairs}"
        super().__init__(message)


class EmptyScopeCellSchema(OutcomeEqualError, ValueError):
    """The scope exempts every protected variable, leaving nothing to equalize."""


class InstanceTooLarge(OutcomeEqualError, ValueError):
    pass


class EmptyDataset(OutcomeEqualError, ValueError):
    pass


class EmptyFile(OutcomeEqualError, ValueError):
    pass


class MissingColumn(OutcomeEqualError, ValueError):
    pass


class RaggedRow(OutcomeEqualError, ValueError):
    pass


class UnknownLevel(OutcomeEqualError, ValueError):
    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}: undeclared level {value!r} in column {column!r}")


class InvalidTable(OutcomeEqualError, ValueError):
    """A conditional probability table row is not a distribution."""


class FormatError(OutcomeEqualError, ValueError):
    """A joint, schema, or synth config file could not be parsed."""
