"""Exception hierarchy shared by every polygeo module."""


class PolygeoError(Exception):
    """Base class for all errors raised by polygeo."""


class DegenerateCurve(PolygeoError, ValueError):
    """Two consecutive vertices coincide (the curve is not regular)."""


class LeftTheSpace(DegenerateCurve):
    """A geodesic integration produced a non-regular intermediate curve."""


class InvalidRotation(PolygeoError, ValueError):
    pass


class NotPositiveDefinite(PolygeoError, ArithmeticError):
    pass


class TooLarge(PolygeoError, ValueError):
    pass


class MaxIterations(PolygeoError, RuntimeError):
    pass


class InitializationFailed(PolygeoError, RuntimeError):
    pass


class NearPuncture(PolygeoError, ValueError):
    """Chart point lies inside the exclusion disk of a puncture."""


class NumericallyUnstable(PolygeoError, ArithmeticError):
    pass


class DegenerateConfiguration(PolygeoError, ValueError):
    pass


class QuadratureNotConverged(PolygeoError, RuntimeError):
    pass


class ParseError(PolygeoError, ValueError):
    pass


class ValidationError(PolygeoError, ValueError):
    pass
