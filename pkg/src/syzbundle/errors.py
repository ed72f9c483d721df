"""Exception hierarchy shared by every module.

Each class maps to one CLI exit code (see ``cli.EXIT_CODES``).
"""


class SyzError(Exception):
    """Base class for all library errors."""


class StructuralError(SyzError):
    """Operands live in different rings or have incompatible shapes."""


class InvalidChernPolynomial(SyzError):
    pass


class UnsupportedError(SyzError):
    """The requested computation is outside what the data can decide."""


class UnsupportedDegree(UnsupportedError):
    pass


class PreconditionError(SyzError):
    pass


class ParseError(SyzError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        if pos is not None and text:
            message = f"{message}\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


class InconsistencyError(SyzError):
    """Two derivations (or a derivation and an input) disagree."""

    def __init__(self, message: str, slot: str | None = None, rule: str | None = None):
        self.slot = slot
        self.rule = rule
        super().__init__(message)


class UnknownBlocked(SyzError):
    """A verdict needs a fact that is not determined by the available data."""


class InternalConsistencyError(SyzError):
    """An internal cross-check failed; indicates a bug rather than bad input."""
