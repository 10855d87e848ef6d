"""Robust fuzzy c-means: IRLS-weighted, kernelized and spatially penalized.

Quick start::

    from robust_fcm import ModelConfig, WeightKind, run
    from robust_fcm.experiments import load_iris
    from robust_fcm.evaluation import preprocess, assign_and_align

    iris = preprocess(load_iris(), "N01")
    result = run(iris, ModelConfig(n_clusters=3, weight=WeightKind("L2")))
    _, accuracy = assign_and_align(result.hard_labels, iris.labels)
"""

from .core import (
    ClusterState,
    ConfigError,
    Dataset,
    DimensionMismatch,
    InvalidFuzziness,
    KernelKind,
    ModelConfig,
    NonPositiveParam,
    NumericalUnderflow,
    PenaltyVariant,
    RunResult,
    TooManyClusters,
    TopologyMismatch,
    WeightKind,
    validate_config,
)
from .engine import objective, run, run_restarts
from .tuning import TuneResult, tune_gamma

__all__ = [
    "ClusterState",
    "ConfigError",
    "Dataset",
    "DimensionMismatch",
    "InvalidFuzziness",
    "KernelKind",
    "ModelConfig",
    "NonPositiveParam",
    "NumericalUnderflow",
    "PenaltyVariant",
    "RunResult",
    "TooManyClusters",
    "TopologyMismatch",
    "TuneResult",
    "WeightKind",
    "objective",
    "run",
    "run_restarts",
    "tune_gamma",
    "validate_config",
]

__version__ = "0.1.0"
