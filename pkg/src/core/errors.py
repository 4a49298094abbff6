"""Exception types raised by the numerical engine"""


class JacobiLabError(Exception):
    """Base class for every error the engine raises on purpose"""


class InvalidParametersError(JacobiLabError):
    """Family parameters that produce a non-positive off-diagonal or an invalid range"""


class NoConvergenceError(JacobiLabError):
    """An accelerated series or tail quadrature missed its tolerance within the iteration budget"""


class SizeExceededError(JacobiLabError):
    """A dense computation was requested above its size guard"""


class ResonanceError(JacobiLabError):
    """The Jost solution nearly vanishes at the origin, so the density blows up"""


class StepUnderflowError(JacobiLabError):
    """The adaptive Prüfer stepper could not make progress"""


class MonotonicityViolationError(JacobiLabError):
    """A comparison bound was asked for a potential that breaks its hypothesis"""


class ConfigParseError(JacobiLabError):
    """An experiment config could not be read or validated"""
