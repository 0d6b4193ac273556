"""Inductive Venn-ABERS calibration for binary classifier scores.

Fit once on a calibration set of (score, label) pairs, then answer
multiprobability queries: for a test score z, the pair (p0, p1) is obtained
by fitting one isotonic regression on the calibration set plus (z, 0) and one
on the calibration set plus (z, 1), each evaluated at z.  ``predict_naive``
implements that definition literally and is kept as the reference oracle;
``IvapCalibrator`` precomputes enough structure to answer every query in
O(log k) with output extensionally equal to the naive computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from ._util import write_text_atomic
from .errors import (
    EmptyCalibration,
    EmptyInput,
    InvalidFraction,
    InvalidMultiprobability,
    InvalidValue,
)
from .isotonic import _pava_blocks

DEFAULT_PROPER_FRACTION = 5 / 6  # 75:15 proper:calibration ratio


class LabeledScore(NamedTuple):
    score: float
    label: int


@dataclass(frozen=True)
class MultiProbability:
    """Lower/upper probability of label 1 plus their log-loss-optimal merge."""

    p0: float
    p1: float
    merged: float

    def __post_init__(self):
        if not (0.0 <= self.p0 <= self.p1 <= 1.0):
            raise InvalidMultiprobability(f"need 0 <= p0 <= p1 <= 1, got ({self.p0}, {self.p1})")
        if not (self.p0 <= self.merged <= self.p1):
            raise InvalidMultiprobability(
                f"merged {self.merged} outside [{self.p0}, {self.p1}]"
            )


def merge_probabilities(p0: float, p1: float) -> float:
    """p1 / (1 - p0 + p1), clamped into [p0, p1] to absorb rounding."""
    if not (math.isfinite(p0) and math.isfinite(p1)):
        raise InvalidValue("p0 and p1 must be finite")
    if not (0.0 <= p0 <= 1.0 and 0.0 <= p1 <= 1.0):
        raise InvalidValue(f"p0 and p1 must lie in [0, 1], got ({p0}, {p1})")
    if p0 > p1:
        raise InvalidMultiprobability(f"p0 {p0} exceeds p1 {p1}")
    raw = p1 / (1.0 - p0 + p1)
    return min(max(raw, p0), p1)


def _validate_calibration(calibration: Sequence[LabeledScore]) -> tuple[np.ndarray, np.ndarray]:
    if len(calibration) == 0:
        raise EmptyCalibration("calibration set is empty")
    scores = np.empty(len(calibration))
    labels = np.empty(len(calibration), dtype=np.int64)
    for i, (score, label) in enumerate(calibration):
        if not math.isfinite(score):
            raise InvalidValue(f"calibration[{i}]: non-finite score {score}")
        if label not in (0, 1):
            raise InvalidValue(f"calibration[{i}]: label {label!r} not in {{0, 1}}")
        scores[i] = score
        labels[i] = int(label)
    return scores, labels


def _pool_calibration(scores: np.ndarray, labels: np.ndarray):
    """Distinct sorted scores with integer weights (counts) and label sums."""
    t, inverse, w = np.unique(scores, return_inverse=True, return_counts=True)
    a = np.zeros(len(t), dtype=np.int64)
    np.add.at(a, inverse, labels)
    return t, w.astype(np.int64), a


def _suffix_hull_parents(xs: list[int], ys: list[int]) -> list[int]:
    """Lower convex hulls of every suffix of an x-increasing point list.

    Points are pushed right-to-left; parent[c] is the next hull vertex to the
    right of c within the hull of points c..n-1.  Parents are fixed once set,
    so the chain starting at c is exactly the suffix hull for version c.
    """
    n = len(xs)
    parent = [-1] * n
    top = -1
    for c in range(n - 1, -1, -1):
        cur = top
        while cur != -1:
            p = parent[cur]
            if p == -1:
                break
            # drop cur while (c, cur, p) is not strictly convex
            if (ys[cur] - ys[c]) * (xs[p] - xs[cur]) >= (ys[p] - ys[cur]) * (xs[cur] - xs[c]):
                cur = p
            else:
                break
        parent[c] = cur
        top = c
    return parent


def _gap_tables(W: list[int], A: list[int], added_label: int) -> tuple[list[int], list[int]]:
    """Isotonic value at a unit point inserted into each gap between groups.

    W and A are prefix sums of group weights and label sums (W[0] = A[0] = 0,
    length m+1 for m groups).  For insertion gap g (after group g, before
    group g+1) the augmented fit takes, at the inserted point, the value

        min over c in g..m of  max over b in 0..g of
            (A[c] + added_label - A[b]) / (W[c] + 1 - W[b])

    which is the slope of the common tangent under the prefix diagram points
    P_b = (W[b], A[b]) and the shifted suffix points S_c = (W[c]+1, A[c]+dy).
    Computed with exact integer cross products; returns (numerators,
    denominators) per gap, each the slope of that tangent.
    """
    m = len(W) - 1
    px, py = W, A
    sx = [x + 1 for x in W]
    sy = [y + added_label for y in A]
    parent_r = _suffix_hull_parents(sx, sy)
    parent_l = [-1] * (m + 1)
    nums = [0] * (m + 1)
    dens = [1] * (m + 1)
    for g in range(m + 1):
        if g > 0:
            # extend the live prefix hull with P_g
            cur = g - 1
            while cur != -1:
                p = parent_l[cur]
                if p == -1:
                    break
                if (py[cur] - py[p]) * (px[g] - px[cur]) >= (py[g] - py[cur]) * (px[cur] - px[p]):
                    cur = p
                else:
                    break
            parent_l[g] = cur
        # tangent walk: maximize the slope leftward over the prefix hull,
        # minimize it rightward over the suffix hull, until neither moves
        b = g
        c = g
        while True:
            moved = False
            while True:
                pb = parent_l[b]
                if pb == -1:
                    break
                if (sy[c] - py[pb]) * (sx[c] - px[b]) >= (sy[c] - py[b]) * (sx[c] - px[pb]):
                    b = pb
                    moved = True
                else:
                    break
            while True:
                pc = parent_r[c]
                if pc == -1:
                    break
                if (sy[pc] - py[b]) * (sx[c] - px[b]) <= (sy[c] - py[b]) * (sx[pc] - px[b]):
                    c = pc
                    moved = True
                else:
                    break
            if not moved:
                break
        nums[g] = sy[c] - py[b]
        dens[g] = sx[c] - px[b]
    return nums, dens


class IvapCalibrator:
    """Immutable calibrator answering (p0, p1) queries in O(log k).

    Construction pools the calibration set by distinct score, then
    precomputes p0 and p1 for every insertion gap between distinct scores
    (O(k log k) overall).  A query only locates its gap by binary search:
    a tie between the test score and a calibration score behaves, for the
    label-1 fit, like inserting just below that score, and for the label-0
    fit like inserting just above it, which is what pooling produces.
    """

    def __init__(self, calibration: Sequence[LabeledScore], provenance: dict | None = None):
        scores, labels = _validate_calibration(calibration)
        self._scores = scores
        self._labels = labels
        self._t, w, a = _pool_calibration(scores, labels)
        W = [0] + np.cumsum(w).tolist()
        A = [0] + np.cumsum(a).tolist()
        n1, d1 = _gap_tables(W, A, 1)
        n0, d0 = _gap_tables(W, A, 0)
        self._f1 = np.asarray(n1, dtype=float) / np.asarray(d1, dtype=float)
        self._f0 = np.asarray(n0, dtype=float) / np.asarray(d0, dtype=float)
        self.provenance = dict(provenance) if provenance else {}

    @property
    def calibration_size(self) -> int:
        return len(self._scores)

    @property
    def distinct_scores(self) -> np.ndarray:
        return self._t.copy()

    @property
    def calibration(self) -> list[LabeledScore]:
        return [LabeledScore(float(s), int(y)) for s, y in zip(self._scores, self._labels)]

    def predict(self, z: float) -> MultiProbability:
        if not math.isfinite(z):
            raise InvalidValue(f"test score must be finite, got {z}")
        g1 = int(np.searchsorted(self._t, z, side="left"))
        g0 = int(np.searchsorted(self._t, z, side="right"))
        p0 = float(self._f0[g0])
        p1 = float(self._f1[g1])
        return MultiProbability(p0, p1, merge_probabilities(p0, p1))

    def predict_arrays(self, scores) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized predict: returns (p0, p1, merged) arrays, order preserved."""
        z = np.asarray(scores, dtype=float)
        bad = ~np.isfinite(z)
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidValue(f"scores[{i}] is not finite: {z[i]}")
        p1 = self._f1[np.searchsorted(self._t, z, side="left")]
        p0 = self._f0[np.searchsorted(self._t, z, side="right")]
        merged = np.minimum(np.maximum(p1 / (1.0 - p0 + p1), p0), p1)
        return p0, p1, merged

    def predict_batch(self, scores: Sequence[float]) -> list[MultiProbability]:
        if len(scores) == 0:
            return []
        p0, p1, merged = self.predict_arrays(scores)
        return [
            MultiProbability(float(a), float(b), float(c))
            for a, b, c in zip(p0, p1, merged)
        ]

    def save(self, path) -> None:
        """Self-describing text artifact; save -> load -> predict is bit-identical."""
        doc = {
            "format": "vak-ivap-calibrator",
            "format_version": 1,
            "calibration": {
                "scores": self._scores.tolist(),
                "labels": self._labels.tolist(),
            },
            "provenance": self.provenance,
        }
        write_text_atomic(path, json.dumps(doc, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "IvapCalibrator":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("format") != "vak-ivap-calibrator":
            raise InvalidValue(f"{path}: not a calibrator artifact")
        if doc.get("format_version") != 1:
            raise InvalidValue(f"{path}: unsupported format version {doc.get('format_version')}")
        pairs = [
            LabeledScore(s, y)
            for s, y in zip(doc["calibration"]["scores"], doc["calibration"]["labels"])
        ]
        return cls(pairs, provenance=doc.get("provenance") or {})


def fit_ivap(calibration: Sequence[LabeledScore], provenance: dict | None = None) -> IvapCalibrator:
    """Build the precomputed calibrator; cost O(k log k) in the set size."""
    return IvapCalibrator(calibration, provenance=provenance)


def predict(calibrator: IvapCalibrator, z: float) -> MultiProbability:
    return calibrator.predict(z)


def predict_batch(calibrator: IvapCalibrator, scores: Sequence[float]) -> list[MultiProbability]:
    return calibrator.predict_batch(scores)


def _naive_fit_value(scores: np.ndarray, labels: np.ndarray, z: float, added: int) -> float:
    """Isotonic fit of the calibration multiset plus (z, added), evaluated at z."""
    s = np.append(scores, z)
    y = np.append(labels, added)
    t, inverse, w = np.unique(s, return_inverse=True, return_counts=True)
    a = np.zeros(len(t), dtype=np.int64)
    np.add.at(a, inverse, y)
    bn, bd, bc = _pava_blocks(a.tolist(), w.astype(np.int64).tolist())
    gi = int(np.searchsorted(t, z))
    ends = np.cumsum(bc)
    bi = int(np.searchsorted(ends, gi, side="right"))
    return bn[bi] / bd[bi]


def predict_naive(calibration: Sequence[LabeledScore], z: float) -> MultiProbability:
    """Reference semantics: two isotonic fits per query, O(k) after sorting."""
    scores, labels = _validate_calibration(calibration)
    if not math.isfinite(z):
        raise InvalidValue(f"test score must be finite, got {z}")
    p0 = _naive_fit_value(scores, labels, z, 0)
    p1 = _naive_fit_value(scores, labels, z, 1)
    return MultiProbability(p0, p1, merge_probabilities(p0, p1))


class SplitResult(NamedTuple):
    proper: list
    calibration: list
    seed: int


def split_training(examples: Sequence, proper_fraction: float, seed: int) -> SplitResult:
    """Seeded shuffle, then split at round(n * proper_fraction).

    Disjoint, union-preserving, and reproducible for a fixed seed; the seed is
    carried in the result so downstream artifacts can record it.
    """
    if not (isinstance(proper_fraction, (int, float)) and math.isfinite(proper_fraction)):
        raise InvalidFraction(f"fraction must be a finite number, got {proper_fraction!r}")
    if not 0.0 < proper_fraction < 1.0:
        raise InvalidFraction(f"fraction must lie strictly between 0 and 1, got {proper_fraction}")
    n = len(examples)
    if n == 0:
        raise EmptyInput("nothing to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_proper = int(round(n * proper_fraction))
    proper = [examples[int(i)] for i in perm[:n_proper]]
    calibration = [examples[int(i)] for i in perm[n_proper:]]
    return SplitResult(proper, calibration, int(seed))
