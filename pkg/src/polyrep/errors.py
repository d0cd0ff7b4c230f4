class PolyrepError(Exception):
    """Base class for all library errors."""


class InputError(PolyrepError):
    """Malformed or invalid H-representation input."""


class ZeroNormal(InputError):
    pass


class DimensionError(InputError):
    pass


class Unbounded(InputError):
    pass


class EmptyPolytope(InputError):
    pass


class NotFullDimensional(InputError):
    pass


class RedundantInequality(InputError):
    pass


class Degenerate(InputError):
    pass


class NotSimple(PolyrepError):
    pass


class SingularNormalMatrix(PolyrepError):
    pass


class ExpansionTooLarge(PolyrepError):
    pass


class SingularMatrix(PolyrepError):
    pass


class NotAccepted(PolyrepError):
    """Interpolation weights are not all positive; ``k`` is too small."""

    def __init__(self, message, y=None):
        super().__init__(message)
        self.y = y


class NonpositiveDelta(PolyrepError):
    pass


class ExhaustedKMax(PolyrepError):
    pass
