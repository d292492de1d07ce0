"""Exception hierarchy shared by every module of the package."""


class InfmatError(Exception):
    """Base class for all errors raised by :mod:`infmat`."""


class FieldMismatch(InfmatError):
    pass


class DivisionByZero(InfmatError, ZeroDivisionError):
    pass


class ModeMismatch(InfmatError):
    pass


class UndefinedProduct(InfmatError):
    pass


class NotFinitary(InfmatError):
    pass


class NotBand(InfmatError):
    pass


class WindowTooSmall(InfmatError):
    pass


class UnpairedWindow(InfmatError):
    pass


class BlockMisalignment(InfmatError):
    pass


class SingularMatrix(InfmatError):
    pass


class GuaranteeTooSmall(InfmatError):
    pass


class InconsistentTable(InfmatError):
    """The table is not the restriction of an inner map on its window."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ZeroIdempotentImage(InconsistentTable):
    pass


class SingularFrame(InconsistentTable):
    pass


class VerificationFailure(InconsistentTable):
    pass


class ParseError(InfmatError, ValueError):
    """Malformed text or file input."""


class UnderdeterminedWarning(UserWarning):
    """A linear recovery left free unknowns; they were set to zero."""
