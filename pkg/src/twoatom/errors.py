"""Exception types raised by the library."""


class TwoAtomError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(TwoAtomError, ValueError):
    pass


class TruncationError(TwoAtomError):
    """The Fock-space truncation drops more weight than the tolerance allows."""


class NumericalError(TwoAtomError, ArithmeticError):
    """A numerical routine did not reach the required accuracy."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class StructureError(TwoAtomError, ValueError):
    """A matrix does not have the shape an operation requires."""


class DegeneracyError(TwoAtomError, ValueError):
    pass
