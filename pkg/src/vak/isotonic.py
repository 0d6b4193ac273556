"""Weighted least-squares isotonic regression with a step-function result.

The fit is the unique nondecreasing minimizer of sum(w_i * (g(x_i) - y_i)^2).
Duplicate x values are pooled into a single point (weighted-mean target,
summed weight) before fitting, so the result is a genuine function of x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyInput, InvalidValue


class ScoredPoint(NamedTuple):
    x: float
    y: float
    w: float = 1.0


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous nondecreasing step function.

    The value at x is ``values[j]`` for the rightmost breakpoint <= x.
    Below the first breakpoint the first value extends to the left.
    Immutable after construction and safe to share across threads.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        va = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or va.ndim != 1 or len(bp) != len(va):
            raise InvalidValue("breakpoints and values must be 1-d and equally long")
        if len(bp) == 0:
            raise EmptyInput("a step function needs at least one breakpoint")
        if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(va)):
            raise InvalidValue("breakpoints and values must be finite")
        if np.any(np.diff(bp) <= 0):
            raise InvalidValue("breakpoints must be strictly increasing")
        if np.any(np.diff(va) < 0):
            raise InvalidValue("values must be nondecreasing")
        bp.flags.writeable = False
        va.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", va)

    def __call__(self, x: float) -> float:
        return evaluate_step(self, x)


def _as_arrays(points: Sequence[ScoredPoint]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(points) == 0:
        raise EmptyInput("need at least one point")
    arr = np.asarray([(p[0], p[1], p[2] if len(p) > 2 else 1.0) for p in points], dtype=float)
    xs, ys, ws = arr[:, 0], arr[:, 1], arr[:, 2]
    if not np.all(np.isfinite(arr)):
        i = int(np.argwhere(~np.isfinite(arr).all(axis=1))[0][0])
        raise InvalidValue(f"point {i} has a non-finite field")
    if np.any(ws <= 0):
        i = int(np.argmax(ws <= 0))
        raise InvalidValue(f"point {i} has non-positive weight {ws[i]}")
    if np.any((ys < 0) | (ys > 1)):
        i = int(np.argmax((ys < 0) | (ys > 1)))
        raise InvalidValue(f"point {i} has target {ys[i]} outside [0, 1]")
    return xs, ys, ws


def _pooled(xs: np.ndarray, ys: np.ndarray, ws: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Merge equal x values: returns (distinct xs, sum of w*y, sum of w).

    Inputs are put into a canonical order first so the floating-point sums,
    and therefore the fit, never depend on the caller's ordering.
    """
    order = np.lexsort((ws, ys, xs))
    xs, ys, ws = xs[order], ys[order], ws[order]
    ux, inverse = np.unique(xs, return_inverse=True)
    num = np.zeros(len(ux))
    den = np.zeros(len(ux))
    np.add.at(num, inverse, ws * ys)
    np.add.at(den, inverse, ws)
    return ux, num, den


def _pava_blocks(nums: Sequence[float], dens: Sequence[float]) -> tuple[list, list, list]:
    """Pool-adjacent-violators on per-point (weighted target sum, weight) pairs.

    Returns parallel lists (block sums, block weights, block point counts).
    Means are compared by cross-multiplication so integer inputs stay exact.
    """
    bn: list = []
    bd: list = []
    bc: list = []
    for num, den in zip(nums, dens):
        cn, cd, cc = num, den, 1
        while bn and bn[-1] * cd > cn * bd[-1]:
            cn += bn.pop()
            cd += bd.pop()
            cc += bc.pop()
        bn.append(cn)
        bd.append(cd)
        bc.append(cc)
    return bn, bd, bc


def pool_duplicates(points: Sequence[ScoredPoint]) -> list[ScoredPoint]:
    """One point per distinct x: weighted-mean target, summed weight, sorted by x."""
    xs, ys, ws = _as_arrays(points)
    ux, num, den = _pooled(xs, ys, ws)
    return [ScoredPoint(float(x), float(n / d), float(d)) for x, n, d in zip(ux, num, den)]


def fit_isotonic(points: Sequence[ScoredPoint]) -> StepFunction:
    """Least-squares nondecreasing fit; breakpoints are the distinct sorted x."""
    xs, ys, ws = _as_arrays(points)
    ux, num, den = _pooled(xs, ys, ws)
    bn, bd, bc = _pava_blocks(num.tolist(), den.tolist())
    values = np.repeat([n / d for n, d in zip(bn, bd)], bc)
    # block means are nondecreasing as real numbers; the running max absorbs
    # the odd one-ulp wobble from rounded products and divisions
    values = np.maximum.accumulate(values)
    return StepFunction(breakpoints=ux, values=values)


def evaluate_step(f: StepFunction, x: float) -> float:
    """Value of the rightmost breakpoint <= x; clamps to the ends outside the range."""
    if not math.isfinite(x):
        raise InvalidValue(f"cannot evaluate a step function at {x}")
    idx = int(np.searchsorted(f.breakpoints, x, side="right")) - 1
    if idx < 0:
        idx = 0
    return float(f.values[idx])
