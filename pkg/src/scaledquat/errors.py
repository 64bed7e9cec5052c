"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end, so
scripts can branch on the failure class without parsing messages.
"""


class HtError(Exception):
    exit_code = 10


class NotStructured(HtError):
    """A complex matrix does not have the block shape of an embedded H_t matrix."""
    exit_code = 11


class ZeroDivisor(HtError, ZeroDivisionError):
    exit_code = 12


class SizeMismatch(HtError, ValueError):
    exit_code = 13


class Singular(HtError):
    exit_code = 14


class NotStarSymmetric(HtError):
    exit_code = 15


class NotNonnegative(HtError):
    exit_code = 16


class EigenFailure(HtError):
    exit_code = 17


class NotIdempotent(HtError):
    exit_code = 18


class NotStarHermitian(HtError):
    exit_code = 19


class NotFreeModule(HtError):
    """A real subspace has no basis as a right H_t-module (possible for t > 0)."""
    exit_code = 20


class PoleAt(HtError):
    exit_code = 9

    def __init__(self, x, msg=None):
        self.x = x
        super().__init__(msg or f"I - xA is singular at x = {x!r}")


class DNotInvertible(HtError):
    exit_code = 21


class InternalInconsistency(HtError):
    exit_code = 22


class NotSimilar(HtError):
    exit_code = 23


class NotMinimal(HtError):
    exit_code = 4


class NotInClass(HtError):
    exit_code = 5


class KindMismatch(HtError):
    exit_code = 6


class DegenerateSubspace(HtError):
    exit_code = 7


class NotInvariant(HtError):
    exit_code = 8


class AInvertibilityRequired(HtError):
    exit_code = 24


class CircleInvertibilityRequired(HtError):
    exit_code = 25


class NotSupporting(HtError):
    exit_code = 26


class SpectralRadiusTooLarge(HtError):
    exit_code = 27


class GramSingular(HtError):
    exit_code = 28


class PreconditionViolated(HtError, ValueError):
    exit_code = 29


class DegenerateAlpha(PreconditionViolated):
    pass


class DegeneratePair(PreconditionViolated):
    pass


class UnimodularAlpha(PreconditionViolated):
    pass


class ParseError(HtError):
    exit_code = 3

    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
