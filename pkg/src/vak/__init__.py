"""Venn-ABERS calibration toolkit.

Turns raw binary classifier scores into well-calibrated probability
predictions, with calibration/accuracy metrics and reliability bubble
charts.  See the README for the pipeline and CLI.
"""

__version__ = "0.1.0"

from .chart import Bubble, build_bubbles, render_chart
from .dataio import ScoreFile, ScoreRow, read_scores, write_scores
from .errors import (
    DegenerateTargets,
    DuplicateId,
    EmptyCalibration,
    EmptyInput,
    InvalidFraction,
    InvalidMultiprobability,
    InvalidValue,
    MissingLabels,
    MissingTarget,
    ParseError,
    ToolkitError,
)
from .isotonic import ScoredPoint, StepFunction, evaluate_step, fit_isotonic, pool_duplicates
from .ivap import (
    DEFAULT_PROPER_FRACTION,
    IvapCalibrator,
    LabeledScore,
    MultiProbability,
    SplitResult,
    fit_ivap,
    merge_probabilities,
    predict,
    predict_batch,
    predict_naive,
    split_training,
)
from .metrics import (
    MetricsReport,
    PredictionRecord,
    ReliabilityBin,
    brier_score,
    compute_report,
    decile_occupancy,
    evaluate_degree,
    expected_calibration_error,
    log_loss,
    macro_f1,
)
from .synth import Distortion, Latent, SynthConfig, generate, generate_score_file

__all__ = [
    "__version__",
    "Bubble",
    "build_bubbles",
    "render_chart",
    "ScoreFile",
    "ScoreRow",
    "read_scores",
    "write_scores",
    "ToolkitError",
    "EmptyInput",
    "InvalidValue",
    "EmptyCalibration",
    "InvalidMultiprobability",
    "InvalidFraction",
    "MissingTarget",
    "DegenerateTargets",
    "MissingLabels",
    "DuplicateId",
    "ParseError",
    "ScoredPoint",
    "StepFunction",
    "fit_isotonic",
    "evaluate_step",
    "pool_duplicates",
    "LabeledScore",
    "MultiProbability",
    "IvapCalibrator",
    "SplitResult",
    "fit_ivap",
    "predict",
    "predict_batch",
    "predict_naive",
    "merge_probabilities",
    "split_training",
    "DEFAULT_PROPER_FRACTION",
    "PredictionRecord",
    "ReliabilityBin",
    "MetricsReport",
    "expected_calibration_error",
    "log_loss",
    "brier_score",
    "macro_f1",
    "evaluate_degree",
    "decile_occupancy",
    "compute_report",
    "SynthConfig",
    "Distortion",
    "Latent",
    "generate",
    "generate_score_file",
]
