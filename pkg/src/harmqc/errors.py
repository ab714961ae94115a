"""Exception hierarchy.

Numeric failures carry the offending location (``where``) when one exists so
that callers and the CLI can report it.
"""


class HarmqcError(Exception):
    """Base class for all errors raised by the package."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where

    def __str__(self):
        msg = super().__str__()
        if self.where is not None:
            msg += f" (at z = {complex(self.where):.6g})"
        return msg


class OutOfValidity(HarmqcError):
    pass


class SeriesDivergence(HarmqcError):
    pass


class OutsideDomain(HarmqcError):
    pass


class InvalidDomain(HarmqcError):
    pass


class InvalidModulus(InvalidDomain):
    """Annulus modulus R <= 1."""


class NonPositiveJacobian(HarmqcError):
    pass


class DegenerateDerivative(HarmqcError):
    pass


class DilatationBoundError(HarmqcError):
    """Raised when a map with sup |omega| >= 1 on its validation grid is built."""


class StencilOutsideDomain(HarmqcError):
    pass


class NotJordan(HarmqcError):
    pass


class NotCovered(HarmqcError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class UnsupportedPair(HarmqcError):
    pass


class ConfigError(HarmqcError):
    pass
