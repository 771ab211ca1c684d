"""Error hierarchy for the invariant-set toolkit.

Every validation failure derives from ``InvariantSetError`` (a ``ValueError``),
which the CLI maps to exit code 2.
"""


class InvariantSetError(ValueError):
    """Base class for rejected inputs and undefined constructions"""


class DimensionMismatch(InvariantSetError):
    """Operands have incompatible dimensions"""


class InvalidDimension(InvariantSetError):
    """A dimension is not a power of two or does not divide the ambient one"""


class UndefinedExponent(InvariantSetError):
    """Exponent is not on the dyadic lattice of the configured universe"""


class OffLattice(InvariantSetError):
    """A cosine (or other rational) lies outside the dyadic lattice"""

    def __init__(self, name: str, value, message: str = None):
        self.name = name
        self.value = value
        super().__init__(message or f"{name}={value} is not on the dyadic lattice")


class NonRepresentablePhi(InvariantSetError):
    """Azimuth cannot be written as pi/2 * J/M for an integer J"""


class IndexOutOfRange(InvariantSetError):
    pass


class InvalidAssignment(InvariantSetError):
    """Lbit parameter list does not match the row/column assignment"""


class InvalidOrientation(InvariantSetError):
    pass


class InvalidCosine(InvariantSetError):
    """Cosine value with magnitude above one"""
