"""Margitron: perceptron-update large-margin linear classifiers with
decaying misclassification thresholds, their convergence and margin
calculators, and a two-stage training protocol."""

from .analysis import (
    BoundInputs,
    BSelection,
    EstimateChoice,
    InequalityCheck,
    MajorantCheck,
    OracleLimitError,
    RootResult,
    StrongFraction,
    b_from_gamma_up,
    best_direction,
    bracketed_power_root,
    check_log_majorant_positive,
    check_log_power_bound,
    check_power_difference_bound,
    choose_estimate_n,
    dense_augmented_vectors,
    fraction_asymptote,
    fraction_est_l,
    fraction_est_t,
    fraction_lower_l,
    fraction_lower_t,
    fraction_lower_t_strong,
    gamma_upper_t,
    max_directional_margin,
    select_b_l,
    select_b_small_eps,
    select_b_t,
    update_bound_l,
    update_bound_t,
)
from .dataset import (
    DatasetError,
    SparsePattern,
    TrainingSet,
    build_training_set,
    format_svmlight,
    load_svmlight,
    parse_prediction_data,
    parse_svmlight,
)
from .engine import (
    HyperParams,
    MarginSummary,
    ModelState,
    Variant,
    apply_update,
    decision_value,
    inner_product,
    is_misclassified,
    margins,
    predict,
    threshold,
)
from .trainer import (
    EpochStats,
    ProtocolError,
    ProtocolReport,
    StageReport,
    TrainReport,
    successive_runnings,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "BSelection",
    "DatasetError",
    "EstimateChoice",
    "EpochStats",
    "HyperParams",
    "InequalityCheck",
    "MajorantCheck",
    "MarginSummary",
    "ModelState",
    "OracleLimitError",
    "ProtocolError",
    "ProtocolReport",
    "RootResult",
    "SparsePattern",
    "StageReport",
    "StrongFraction",
    "TrainReport",
    "TrainingSet",
    "Variant",
    "apply_update",
    "b_from_gamma_up",
    "best_direction",
    "bracketed_power_root",
    "build_training_set",
    "check_log_majorant_positive",
    "check_log_power_bound",
    "check_power_difference_bound",
    "choose_estimate_n",
    "decision_value",
    "dense_augmented_vectors",
    "format_svmlight",
    "fraction_asymptote",
    "fraction_est_l",
    "fraction_est_t",
    "fraction_lower_l",
    "fraction_lower_t",
    "fraction_lower_t_strong",
    "gamma_upper_t",
    "inner_product",
    "is_misclassified",
    "load_svmlight",
    "margins",
    "max_directional_margin",
    "parse_prediction_data",
    "parse_svmlight",
    "predict",
    "select_b_l",
    "select_b_small_eps",
    "select_b_t",
    "successive_runnings",
    "threshold",
    "train",
    "update_bound_l",
    "update_bound_t",
]
