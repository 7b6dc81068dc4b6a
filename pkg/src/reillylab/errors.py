"""Typed exceptions raised by the laboratory.

Every guard in the package raises one of these instead of letting NaNs or
silently wrong shapes propagate into a report.
"""


class ReillyLabError(Exception):
    """Base class for all package errors."""


class ShapeError(ReillyLabError, ValueError):
    """An array argument has the wrong shape or fails a symmetry guard."""


class ArgumentError(ReillyLabError, ValueError):
    """A scalar argument is out of its documented range."""


class UnsupportedConfiguration(ReillyLabError, ValueError):
    """The requested combination (e.g. odd rank with codimension > 1 where a
    scalar-valued tensor is required) has no meaning."""


class DegenerateNormalError(ReillyLabError, ValueError):
    """A construction needs a nonzero mean curvature vector and got |H| ~ 0."""


class EllipticityError(ReillyLabError, ValueError):
    """A tensor that must be positive definite is not, within tolerance."""


class ImmersionError(ReillyLabError, ValueError):
    """A chart point maps outside the ambient constraint set, or derivative
    data is rank deficient."""


class TopologyError(ReillyLabError, ValueError):
    """A mesh fails the watertightness/orientation guards, or a geometry
    cannot be triangulated."""


class PoleProximityError(ReillyLabError, ValueError):
    """A conformal transformation was evaluated too close to its pole."""


class ConvergenceError(ReillyLabError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class InequalityViolation(ReillyLabError, AssertionError):
    """A verified inequality failed beyond the numerical tolerance."""


class ConfigError(ReillyLabError, ValueError):
    """A scenario configuration file is malformed or inconsistent."""
