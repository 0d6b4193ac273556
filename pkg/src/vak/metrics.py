"""Calibration and predictive-performance metrics.

Expected calibration error over M equal-width bins, log loss, Brier score,
macro-averaged F1, RMSE/R^2 against real-valued degree targets, and a
decile-occupancy sharpness summary.  All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateTargets, EmptyInput, InvalidValue, MissingTarget

DEFAULT_NUM_BINS = 10
LOG_LOSS_EPS = 1e-15


@dataclass(frozen=True)
class PredictionRecord:
    probability: float
    label: int
    degree_target: float | None = None

    def __post_init__(self):
        if not (isinstance(self.probability, (int, float)) and 0.0 <= self.probability <= 1.0):
            raise InvalidValue(f"probability {self.probability!r} outside [0, 1]")
        if self.label not in (0, 1):
            raise InvalidValue(f"label {self.label!r} not in {{0, 1}}")
        if self.degree_target is not None and not 0.0 <= self.degree_target <= 1.0:
            raise InvalidValue(f"degree target {self.degree_target!r} outside [0, 1]")


@dataclass(frozen=True)
class ReliabilityBin:
    """One occupied probability bin (lower, upper]."""

    lower: float
    upper: float
    count: int
    mean_confidence: float
    positive_fraction: float


@dataclass
class MetricsReport:
    ece: float
    log_loss: float
    brier: float
    macro_f1: float
    n: int
    bins: list[ReliabilityBin]
    decile_occupancy: int
    rmse: float | None = None
    r2: float | None = None

    def to_text(self) -> str:
        lines = [
            f"n {self.n}",
            f"ece {self.ece:.6f}",
            f"log_loss {self.log_loss:.6f}",
            f"brier {self.brier:.6f}",
            f"macro_f1 {self.macro_f1:.6f}",
            f"decile_occupancy {self.decile_occupancy}",
        ]
        if self.rmse is not None:
            lines.append(f"rmse {self.rmse:.6f}")
        if self.r2 is not None:
            lines.append(f"r2 {self.r2:.6f}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        doc = {
            "n": self.n,
            "ece": self.ece,
            "log_loss": self.log_loss,
            "brier": self.brier,
            "macro_f1": self.macro_f1,
            "decile_occupancy": self.decile_occupancy,
            "bins": [
                {
                    "lower": b.lower,
                    "upper": b.upper,
                    "count": b.count,
                    "mean_confidence": b.mean_confidence,
                    "positive_fraction": b.positive_fraction,
                }
                for b in self.bins
            ],
        }
        if self.rmse is not None:
            doc["rmse"] = self.rmse
        if self.r2 is not None:
            doc["r2"] = self.r2
        return doc


def _arrays(records: Sequence[PredictionRecord]) -> tuple[np.ndarray, np.ndarray]:
    if len(records) == 0:
        raise EmptyInput("no prediction records")
    p = np.asarray([r.probability for r in records], dtype=float)
    y = np.asarray([r.label for r in records], dtype=float)
    return p, y


def _bin_indices(p: np.ndarray, num_bins: int) -> np.ndarray:
    # membership in (lower, upper]; probability exactly 0 goes to the first bin
    edges = np.arange(1, num_bins + 1) / num_bins
    return np.searchsorted(edges, p, side="left")


def expected_calibration_error(
    records: Sequence[PredictionRecord], num_bins: int = DEFAULT_NUM_BINS
) -> tuple[float, list[ReliabilityBin]]:
    """Bin-weighted mean absolute gap between confidence and accuracy.

    Empty bins carry zero weight and are excluded from the returned rows.
    """
    if num_bins < 1:
        raise InvalidValue(f"num_bins must be >= 1, got {num_bins}")
    p, y = _arrays(records)
    idx = _bin_indices(p, num_bins)
    counts = np.bincount(idx, minlength=num_bins)
    conf_sums = np.bincount(idx, weights=p, minlength=num_bins)
    pos_sums = np.bincount(idx, weights=y, minlength=num_bins)
    bins: list[ReliabilityBin] = []
    total = 0.0
    n = len(p)
    for m in range(num_bins):
        if counts[m] == 0:
            continue
        mean_conf = conf_sums[m] / counts[m]
        pos_frac = pos_sums[m] / counts[m]
        total += counts[m] * abs(pos_frac - mean_conf)
        bins.append(
            ReliabilityBin(
                lower=m / num_bins,
                upper=(m + 1) / num_bins,
                count=int(counts[m]),
                mean_confidence=float(mean_conf),
                positive_fraction=float(pos_frac),
            )
        )
    return total / n, bins


def log_loss(records: Sequence[PredictionRecord]) -> float:
    """Mean cross-entropy with probabilities clipped to [eps, 1-eps], eps = 1e-15."""
    p, y = _arrays(records)
    p = np.clip(p, LOG_LOSS_EPS, 1.0 - LOG_LOSS_EPS)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def brier_score(records: Sequence[PredictionRecord]) -> float:
    p, y = _arrays(records)
    return float(np.mean((p - y) ** 2))


def macro_f1(records: Sequence[PredictionRecord], threshold: float = 0.5) -> float:
    """Mean of the per-label F1 scores; predicted label is 1 iff p > threshold.

    A label with no true and no predicted instances scores 1 by convention;
    any other zero denominator scores 0.
    """
    if not 0.0 < threshold < 1.0:
        raise InvalidValue(f"threshold must lie in (0, 1), got {threshold}")
    p, y = _arrays(records)
    pred = p > threshold
    truth = y == 1.0
    scores = []
    for positive in (False, True):
        tp = int(np.sum((pred == positive) & (truth == positive)))
        fp = int(np.sum((pred == positive) & (truth != positive)))
        fn = int(np.sum((pred != positive) & (truth == positive)))
        if tp == 0 and fp == 0 and fn == 0:
            scores.append(1.0)
        elif 2 * tp + fp + fn == 0:
            scores.append(0.0)
        else:
            scores.append(2 * tp / (2 * tp + fp + fn))
    return float(np.mean(scores))


def evaluate_degree(records: Sequence[PredictionRecord]) -> tuple[float, float]:
    """RMSE and R^2 of the probabilities against real-valued degree targets."""
    p, _ = _arrays(records)
    if any(r.degree_target is None for r in records):
        i = next(i for i, r in enumerate(records) if r.degree_target is None)
        raise MissingTarget(f"record {i} has no degree target")
    t = np.asarray([r.degree_target for r in records], dtype=float)
    ss_res = float(np.sum((p - t) ** 2))
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateTargets("degree targets have zero variance")
    rmse = math.sqrt(ss_res / len(p))
    r2 = 1.0 - ss_res / ss_tot
    return rmse, r2


def decile_occupancy(records: Sequence[PredictionRecord]) -> int:
    """Number of the 10 equal-width bins holding at least 1% of the records."""
    p, _ = _arrays(records)
    idx = _bin_indices(p, 10)
    counts = np.bincount(idx, minlength=10)
    n = len(p)
    return int(np.sum(100 * counts >= n))


def compute_report(
    records: Sequence[PredictionRecord],
    num_bins: int = DEFAULT_NUM_BINS,
    threshold: float = 0.5,
    include_degree: bool = False,
) -> MetricsReport:
    ece, bins = expected_calibration_error(records, num_bins)
    rmse = r2 = None
    if include_degree:
        rmse, r2 = evaluate_degree(records)
    return MetricsReport(
        ece=ece,
        log_loss=log_loss(records),
        brier=brier_score(records),
        macro_f1=macro_f1(records, threshold),
        n=len(records),
        bins=bins,
        decile_occupancy=decile_occupancy(records),
        rmse=rmse,
        r2=r2,
    )
