"""Bures-Wasserstein geometry of covariance matrices of any rank.

Layers, bottom up: ``linalg`` (tolerance-aware kernels), ``spd`` (the
full-rank cone), ``stratum`` (fixed-rank manifolds), ``cov`` (the metric
space of all PSD matrices and its minimizing geodesics), and ``oracles``
(brute-force checks for tests).
"""

from ._kernels import BACKEND
from .cov import (
    AlignedFactors,
    BallParam,
    CovPoint,
    Count,
    GeodesicCount,
    RankProfile,
    aligned_factors,
    bw_distance,
    canonical_geodesic,
    count_minimizing_geodesics,
    interpolate,
    is_minimal_rank_param,
    minimizing_geodesic,
    rank_product,
    rank_profile,
    register,
)
from .exceptions import (
    AsymmetricInput,
    BWGeoError,
    ConvergenceFailure,
    DimensionMismatch,
    FactorMismatch,
    NonConstantRank,
    NotPreimage,
    NotPsd,
    NotSpd,
    NotTangent,
    NotUnique,
    ParamOutOfBall,
    RankDeficient,
    RankMismatch,
)
from .linalg import DEFAULT_TOL, Tolerances
from .segment import GeodesicSegment, OpenInterval
from .spd import (
    FullTangent,
    OutOfDomainWarning,
    SpdPoint,
    cut_time_full,
    definition_interval_full,
    exp_full,
    geodesic_full,
    horizontal_lift_full,
    log_full,
    metric_full,
)
from .stratum import (
    LogFamily,
    LogKind,
    RotationCandidate,
    StratumPoint,
    StratumTangent,
    cut_time_stratum,
    definition_interval_stratum,
    exp_stratum,
    geodesic_stratum_by_rotation,
    horizontal_lift_stratum,
    is_preimage,
    log_map_stratum,
    logarithms_stratum,
    metric_stratum,
    project_tangent,
    rotation_from_tangent,
    tangent_from_rotation,
)

__version__ = "0.1.0"
