"""Exception types shared across the workbench."""


class TruthbenchError(Exception):
    pass


class CodeLimitError(TruthbenchError):
    """A sequence code would exceed the configured magnitude limit."""


class ParseError(TruthbenchError):
    """Formula text could not be parsed; carries a position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SymbolError(TruthbenchError):
    """A symbol is unknown to the structure or coding at hand."""


class ArityError(TruthbenchError):
    """Declared and actual arities disagree."""


class SubstitutionError(TruthbenchError):
    """A scheme substitution cannot be carried out."""


class BoundError(TruthbenchError):
    """An argument or result exceeded the structure's magnitude bound."""


class BudgetError(TruthbenchError):
    """A combinatorial budget was exceeded; carries the offending counts."""

    def __init__(self, message: str, counts: dict | None = None):
        super().__init__(message)
        self.counts = dict(counts or {})


class NotationError(TruthbenchError):
    """An ordinal notation is malformed or outside the supported range."""


class PreconditionError(TruthbenchError):
    """An operation was invoked outside its stated precondition."""
