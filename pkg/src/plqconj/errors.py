"""Exception hierarchy.

Input problems derive from :class:`InputError`; violations of structural
invariants that indicate a bug or an input outside the supported class derive
from :class:`InvariantError`. The CLI maps these onto exit codes 2 and 3.
"""


class PLQError(Exception):
    pass


class InputError(PLQError):
    pass


class InvariantError(PLQError):
    pass


class ParseError(InputError):
    pass


class InvalidSubdivision(InputError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class UnsupportedField(InputError):
    pass


class OutsideDomain(InputError):
    pass


class DivisionByZero(PLQError, ZeroDivisionError):
    pass


class NoPsiForm(InvariantError):
    pass


class DegenerateDenominator(InvariantError):
    pass


class DegenerateEdge(InvariantError):
    pass


class EnvelopeAssemblyFailure(InvariantError):
    pass


class NotStrictlyConvexFace(InvariantError):
    pass


class FractionalFormEncountered(InvariantError):
    pass


class BothNonlinear(InvariantError):
    pass
