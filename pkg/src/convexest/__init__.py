"""convexest: estimation of convex supports from uniform samples.

The estimators are the convex hull of the sample, the minimum-area
polygon with a vertex budget, and an adaptive estimator that picks the
budget from the data. The experiments module provides seeded Monte
Carlo risk curves, identity checks and lower-bound constructions around
them.
"""

__version__ = "0.1.0"

from .errors import (
    CheckFailed,
    ConvexestError,
    DegenerateInput,
    DimensionMismatch,
    InsufficientData,
    InvalidParameters,
    ParseError,
    UnsupportedCombination,
    UnsupportedDimension,
    ValidationError,
)
from .geometry import (
    ConvexPolygon,
    area,
    contains,
    convex_hull,
    grid_snap,
    hausdorff,
    intersect,
    intersection_area,
    polygon_disk_intersection_area,
    symm_diff_area,
)
from .sampling import (
    BallSupport,
    CubeSupport,
    DiskSupport,
    PolygonSupport,
    Seed,
    Support,
    membership,
    sample_support,
    support_area,
    support_from_json,
    unit_square,
)
from .estimators import (
    AdaptiveConfig,
    AdaptiveResult,
    AdaptiveSupportEstimator,
    ConvexHullEstimator,
    EstimateResult,
    MinAreaPolygonEstimator,
    adaptive,
    hull_estimator,
    loo_outside_count,
    min_kgon,
    theory_threshold,
)
from .experiments import (
    HypothesisFamily,
    RateFit,
    RiskCurve,
    RiskPoint,
    build_family,
    deviation_tail,
    efron_check,
    family_checks,
    hellinger_affinity,
    rate_fit,
    risk_curve,
    risk_mc,
    vertex_count_curve,
    vertex_count_scaling,
)

__all__ = [
    "AdaptiveConfig",
    "AdaptiveResult",
    "AdaptiveSupportEstimator",
    "BallSupport",
    "CheckFailed",
    "ConvexHullEstimator",
    "ConvexPolygon",
    "ConvexestError",
    "CubeSupport",
    "DegenerateInput",
    "DimensionMismatch",
    "DiskSupport",
    "EstimateResult",
    "HypothesisFamily",
    "InsufficientData",
    "InvalidParameters",
    "MinAreaPolygonEstimator",
    "ParseError",
    "PolygonSupport",
    "RateFit",
    "RiskCurve",
    "RiskPoint",
    "Seed",
    "Support",
    "UnsupportedCombination",
    "UnsupportedDimension",
    "ValidationError",
    "adaptive",
    "area",
    "build_family",
    "contains",
    "convex_hull",
    "deviation_tail",
    "efron_check",
    "family_checks",
    "grid_snap",
    "hausdorff",
    "hellinger_affinity",
    "hull_estimator",
    "intersect",
    "intersection_area",
    "loo_outside_count",
    "membership",
    "min_kgon",
    "polygon_disk_intersection_area",
    "rate_fit",
    "risk_curve",
    "risk_mc",
    "sample_support",
    "support_area",
    "support_from_json",
    "symm_diff_area",
    "theory_threshold",
    "unit_square",
    "vertex_count_curve",
    "vertex_count_scaling",
]
