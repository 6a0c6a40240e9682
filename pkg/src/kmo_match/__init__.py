"""Context-aware one-to-one point matching for dense localization tasks.

The library matches predicted points to ground-truth points with a Hungarian
solver under either a plain spatial cost or a context-aware cost that also
compares local density (mean k-nearest-neighbor distance) on both sides. On
top of the matcher it provides set-prediction losses, localization and
counting evaluation protocols, deterministic synthetic scenes, and an
exhaustive small-instance oracle for verification.
"""

__version__ = "0.1.0"

from .errors import (
    EmptySetError,
    InvalidInputError,
    InvalidSpecError,
    IoError,
    KmoMatchError,
    MissingBoxError,
    MissingFeatureError,
    OracleTooLargeError,
    SchemaError,
    TooManyGroundTruthsError,
)
from .geometry import (
    Metric,
    NeighborFeature,
    Point,
    PointSet,
    knn_mean_distance,
    pairwise_distance,
)
from .matcher import (
    ORACLE_MAX_GT,
    Assignment,
    CostMatrix,
    GtPoint,
    MatchConfig,
    MatchResult,
    PredPoint,
    brute_force_assignment,
    build_cost_kmo,
    build_cost_l1,
    match_points,
    solve_hungarian,
)
from .losses import (
    LOC_WEIGHT,
    LossReport,
    focal_cls_loss,
    loc_loss,
    matched_labels,
    normalize_points,
    total_loss,
)
from .evaluation import (
    DEFAULT_TAU,
    QNRF_SIGMAS,
    CountPair,
    EvalReport,
    MatchedPair,
    counting_metrics,
    eval_localization,
    filter_by_confidence,
    prf,
    sigma_nwpu,
    threshold_match,
)
from .synth import (
    AmbiguityReport,
    PerturbSpec,
    SceneSpec,
    TwoDensitySpec,
    ambiguity_report,
    count_crossings,
    dense_to_sparse_swaps,
    gen_scene,
    gen_two_density,
    perturb,
    verify_with_oracle,
)
from .sceneio import SCHEMA, Scene, load_scenes, parse_scenes, write_scenes

__all__ = [
    "__version__",
    "KmoMatchError", "EmptySetError", "InvalidInputError", "InvalidSpecError",
    "IoError", "MissingBoxError", "MissingFeatureError", "OracleTooLargeError",
    "SchemaError", "TooManyGroundTruthsError",
    "Metric", "NeighborFeature", "Point", "PointSet",
    "knn_mean_distance", "pairwise_distance",
    "ORACLE_MAX_GT", "Assignment", "CostMatrix", "GtPoint", "MatchConfig",
    "MatchResult", "PredPoint", "brute_force_assignment", "build_cost_kmo",
    "build_cost_l1", "match_points", "solve_hungarian",
    "LOC_WEIGHT", "LossReport", "focal_cls_loss", "loc_loss", "matched_labels",
    "normalize_points", "total_loss",
    "DEFAULT_TAU", "QNRF_SIGMAS", "CountPair", "EvalReport", "MatchedPair",
    "counting_metrics", "eval_localization", "filter_by_confidence", "prf",
    "sigma_nwpu", "threshold_match",
    "AmbiguityReport", "PerturbSpec", "SceneSpec", "TwoDensitySpec",
    "ambiguity_report", "count_crossings", "dense_to_sparse_swaps", "gen_scene",
    "gen_two_density", "perturb", "verify_with_oracle",
    "SCHEMA", "Scene", "load_scenes", "parse_scenes", "write_scenes",
]
