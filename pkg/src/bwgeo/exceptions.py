"""Exception hierarchy for bwgeo."""


class BWGeoError(Exception):
    """Base class for all errors raised by bwgeo."""


class AsymmetricInput(BWGeoError, ValueError):
    pass


class NotPsd(BWGeoError, ValueError):
    pass


class NotSpd(NotPsd):
    pass


class RankDeficient(BWGeoError, ValueError):
    pass


class ConvergenceFailure(BWGeoError, ArithmeticError):
    pass


class FactorMismatch(BWGeoError, ValueError):
    """A factor X does not satisfy X X^T = Sigma within tolerance."""


class DimensionMismatch(BWGeoError, ValueError):
    pass


class RankMismatch(BWGeoError, ValueError):
    pass


class NotPreimage(BWGeoError, ValueError):
    """A rotation (or tangent) does not index a geodesic reaching the target."""


class NotUnique(BWGeoError, ValueError):
    """The logarithm is not unique; use the family-valued variant."""


class ParamOutOfBall(BWGeoError, ValueError):
    """The ball parameter has spectral norm larger than one."""


class NonConstantRank(BWGeoError, ValueError):
    pass


class NotTangent(BWGeoError, ValueError):
    """A symmetric matrix is not tangent to the fixed-rank stratum."""
