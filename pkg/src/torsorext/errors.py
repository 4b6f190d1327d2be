"""Exception hierarchy shared by every module."""


class TorsorExtError(Exception):
    """Base class for all library errors."""


class DivisionByZero(TorsorExtError, ZeroDivisionError):
    pass


class FieldMismatch(TorsorExtError):
    pass


class RegistryMismatch(TorsorExtError):
    pass


class PolySyntaxError(TorsorExtError):
    """Raised by the polynomial parser; carries the 0-based column."""

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownVariable(TorsorExtError):
    pass


class ZeroPolynomial(TorsorExtError):
    pass


class ExponentOverflow(TorsorExtError):
    pass


class ResourceLimit(TorsorExtError):
    pass


class NotAHopfIdeal(TorsorExtError):
    pass


class NotEquivariant(TorsorExtError):
    pass


class EmptyFiber(TorsorExtError):
    pass


class CenterNotInSpecialFiber(TorsorExtError):
    pass


class SectionNotInSpecialFiber(TorsorExtError):
    pass


class CapExceeded(TorsorExtError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CharacteristicMismatch(TorsorExtError):
    pass


class NotPointed(TorsorExtError):
    pass


class ZeroRelation(TorsorExtError):
    pass


class ProblemFileError(TorsorExtError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class UnsupportedSection(TorsorExtError):
    """The blown-up torsor cannot be re-embedded in GL_d by a diagonal conjugation."""
