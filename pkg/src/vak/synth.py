"""Seeded synthetic score generator with known ground-truth probabilities.

Each example draws a latent true probability q, a label ~ Bernoulli(q), and a
reported score obtained by distorting q through a temperature on the logit
scale: sigmoid(a * logit(q)).  With a > 1 the reported scores crowd toward 0
and 1 (overconfident) while the true calibration stays analytically known,
so calibration claims can be checked end to end without training a model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataio import ScoreFile, ScoreRow
from .errors import InvalidValue
from .ivap import LabeledScore

GENERATOR_ID = "numpy-default-rng(PCG64)"

_BIMODAL_CENTERS = (0.15, 0.85)
_LATENT_EPS = 1e-6


@dataclass(frozen=True)
class Distortion:
    kind: str  # identity | overconfident | underconfident
    a: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise InvalidValue(f"distortion parameter must be a positive real, got {self.a!r}")
        if self.kind == "identity":
            if self.a != 1.0:
                raise InvalidValue("identity distortion has a = 1")
        elif self.kind == "overconfident":
            if self.a <= 1.0:
                raise InvalidValue(f"overconfident needs a > 1, got {self.a}")
        elif self.kind == "underconfident":
            if self.a >= 1.0:
                raise InvalidValue(f"underconfident needs a < 1, got {self.a}")
        else:
            raise InvalidValue(f"unknown distortion {self.kind!r}")


@dataclass(frozen=True)
class Latent:
    kind: str  # uniform | bimodal
    mix: float = 0.5
    spread: float = 0.08

    def __post_init__(self):
        if self.kind not in ("uniform", "bimodal"):
            raise InvalidValue(f"unknown latent law {self.kind!r}")
        if not 0.0 < self.mix < 1.0:
            raise InvalidValue(f"mix must lie in (0, 1), got {self.mix}")
        if not (math.isfinite(self.spread) and self.spread > 0):
            raise InvalidValue(f"spread must be positive, got {self.spread}")


IDENTITY = Distortion("identity")
UNIFORM = Latent("uniform")


@dataclass(frozen=True)
class SynthConfig:
    n: int
    seed: int
    distortion: Distortion = IDENTITY
    latent: Latent = UNIFORM

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise InvalidValue(f"n must be a positive integer, got {self.n!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise InvalidValue(f"seed must be a nonnegative integer, got {self.seed!r}")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _logit(p: np.ndarray) -> np.ndarray:
    return np.log(p / (1.0 - p))


def generate(config: SynthConfig) -> list[tuple[LabeledScore, float]]:
    """Draw (LabeledScore, true probability) pairs, deterministic per seed."""
    rng = np.random.default_rng(config.seed)
    n = config.n
    if config.latent.kind == "uniform":
        q = rng.random(n)
        q = np.clip(q, _LATENT_EPS, 1.0 - _LATENT_EPS)
    else:
        which = rng.random(n) < config.latent.mix
        centers = np.where(which, _BIMODAL_CENTERS[1], _BIMODAL_CENTERS[0])
        q = centers + config.latent.spread * rng.standard_normal(n)
        q = np.clip(q, _LATENT_EPS, 1.0 - _LATENT_EPS)
    labels = (rng.random(n) < q).astype(int)
    if config.distortion.kind == "identity":
        s = q.copy()
    else:
        s = _sigmoid(config.distortion.a * _logit(q))
    return [
        (LabeledScore(float(si), int(yi)), float(qi)) for si, yi, qi in zip(s, labels, q)
    ]


def generate_score_file(config: SynthConfig, id_prefix: str = "synth") -> ScoreFile:
    """Rows carry the distorted score, the label, and q in the target column."""
    rows = [
        ScoreRow(id=f"{id_prefix}-{i:06d}", score=ls.score, label=ls.label, target=q)
        for i, (ls, q) in enumerate(generate(config))
    ]
    source = (
        f"generator={GENERATOR_ID} seed={config.seed} n={config.n} "
        f"distortion={config.distortion.kind}:{config.distortion.a:g} "
        f"latent={config.latent.kind}"
    )
    return ScoreFile(rows=rows, source=source)
