"""Reliability bubble charts.

Predictions are snapped to a probability grid; each occupied grid point
becomes one bubble positioned at (output probability, observed accuracy)
and sized by how many predictions landed there.  Renders to SVG or CSV,
deterministically for a fixed input.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyInput, InvalidValue
from .metrics import PredictionRecord

DEFAULT_GRID_STEP = 0.02


class Bubble(NamedTuple):
    probability: float
    accuracy: float
    count: int


def build_bubbles(
    records: Sequence[PredictionRecord], grid_step: float = DEFAULT_GRID_STEP
) -> list[Bubble]:
    """Snap each record to the nearest multiple of grid_step and group."""
    if len(records) == 0:
        raise EmptyInput("no prediction records")
    if not 0.0 < grid_step <= 0.5:
        raise InvalidValue(f"grid_step must lie in (0, 0.5], got {grid_step}")
    p = np.asarray([r.probability for r in records], dtype=float)
    y = np.asarray([r.label for r in records], dtype=float)
    keys = np.rint(p / grid_step).astype(np.int64)
    out = []
    for k in np.unique(keys):
        mask = keys == k
        count = int(mask.sum())
        out.append(
            Bubble(
                probability=float(k * grid_step),
                accuracy=float(y[mask].mean()),
                count=count,
            )
        )
    return out


def _csv(bubbles: Sequence[Bubble]) -> str:
    lines = ["probability,accuracy,count"]
    for b in bubbles:
        lines.append(f"{b.probability!r},{b.accuracy!r},{b.count}")
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[Bubble]:
    """Inverse of the CSV rendering; round-trips exactly."""
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != "probability,accuracy,count":
        raise InvalidValue("not a bubble-chart CSV")
    out = []
    for ln in lines[1:]:
        prob, acc, count = ln.split(",")
        out.append(Bubble(float(prob), float(acc), int(count)))
    return out


_MARGIN = 50.0
_PLOT = 380.0
_SIDE = 2 * _MARGIN + _PLOT
_MAX_RADIUS = 16.0


def _svg(bubbles: Sequence[Bubble]) -> str:
    def sx(p: float) -> float:
        return _MARGIN + p * _PLOT

    def sy(a: float) -> float:
        return _MARGIN + (1.0 - a) * _PLOT

    cmax = max(b.count for b in bubbles)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIDE:g}" height="{_SIDE:g}" '
        f'viewBox="0 0 {_SIDE:g} {_SIDE:g}">',
        f'<rect x="{_MARGIN:g}" y="{_MARGIN:g}" width="{_PLOT:g}" height="{_PLOT:g}" '
        'fill="white" stroke="#444" stroke-width="1"/>',
        f'<line x1="{sx(0.0)!r}" y1="{sy(0.0)!r}" x2="{sx(1.0)!r}" y2="{sy(1.0)!r}" '
        'stroke="#999" stroke-dasharray="4 3" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{sx(frac)!r}" y="{_SIDE - 18.0!r}" font-size="12" '
            f'text-anchor="middle">{frac:g}</text>'
        )
        parts.append(
            f'<text x="{_MARGIN - 28.0!r}" y="{sy(frac)!r}" font-size="12" '
            f'text-anchor="middle">{frac:g}</text>'
        )
    parts.append(
        f'<text x="{_SIDE / 2!r}" y="{_SIDE - 4.0!r}" font-size="13" '
        'text-anchor="middle">output probability</text>'
    )
    parts.append(
        f'<text x="14" y="{_SIDE / 2!r}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 14 {_SIDE / 2!r})">observed accuracy</text>'
    )
    for b in bubbles:
        r = _MAX_RADIUS * math.sqrt(b.count / cmax)
        parts.append(
            f'<circle cx="{sx(b.probability)!r}" cy="{sy(b.accuracy)!r}" r="{r!r}" '
            f'fill="#2b6cb0" fill-opacity="0.55" stroke="#1a4a7a" stroke-width="0.8">'
            f"<title>p={b.probability!r} acc={b.accuracy!r} n={b.count}</title></circle>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart(bubbles: Sequence[Bubble], output_format: str) -> str:
    """Render to an SVG 1.1 or CSV document; bubble radius tracks sqrt(count)."""
    if len(bubbles) == 0:
        raise EmptyInput("no bubbles to render")
    if output_format == "csv":
        return _csv(bubbles)
    if output_format == "svg":
        return _svg(bubbles)
    raise InvalidValue(f"unknown output format {output_format!r}")
