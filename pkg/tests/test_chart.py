"""Tests for reliability bubble charts."""

import re

import numpy as np
import pytest

from vak.chart import Bubble, build_bubbles, parse_csv, render_chart
from vak.errors import EmptyInput, InvalidValue
from vak.metrics import PredictionRecord
from vak.synth import Distortion, Latent, SynthConfig, generate


def records(probs, labels):
    return [PredictionRecord(p, y) for p, y in zip(probs, labels)]


class TestBuildBubbles:
    def test_neighbors_snap_together(self):
        bubbles = build_bubbles(records([0.501, 0.499], [1, 0]), grid_step=0.02)
        assert bubbles == [Bubble(0.5, 0.5, 2)]

    def test_single_record(self):
        assert build_bubbles(records([0.9], [1])) == [Bubble(0.9, 1.0, 1)]

    def test_far_apart_records_stay_apart(self):
        bubbles = build_bubbles(records([0.1, 0.9], [0, 1]))
        assert [b.count for b in bubbles] == [1, 1]
        assert bubbles[0].probability < bubbles[1].probability

    def test_counts_sum_to_records(self):
        rng = np.random.default_rng(0)
        recs = records(rng.random(500).tolist(), rng.integers(0, 2, 500).tolist())
        bubbles = build_bubbles(recs, grid_step=0.05)
        assert sum(b.count for b in bubbles) == 500

    def test_sorted_by_probability(self):
        rng = np.random.default_rng(1)
        recs = records(rng.random(200).tolist(), rng.integers(0, 2, 200).tolist())
        probs = [b.probability for b in build_bubbles(recs)]
        assert probs == sorted(probs)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            build_bubbles([])

    def test_bad_grid_rejected(self):
        with pytest.raises(InvalidValue):
            build_bubbles(records([0.5], [1]), grid_step=0.0)
        with pytest.raises(InvalidValue):
            build_bubbles(records([0.5], [1]), grid_step=0.6)


class TestRenderCsv:
    def test_round_trip(self):
        rng = np.random.default_rng(2)
        recs = records(rng.random(300).tolist(), rng.integers(0, 2, 300).tolist())
        bubbles = build_bubbles(recs)
        assert parse_csv(render_chart(bubbles, "csv")) == bubbles

    def test_header(self):
        text = render_chart([Bubble(0.5, 0.5, 1)], "csv")
        assert text.splitlines()[0] == "probability,accuracy,count"


class TestRenderSvg:
    def test_calibrated_bubbles_sit_on_diagonal(self):
        bubbles = [Bubble(p, p, 5) for p in (0.1, 0.5, 0.9)]
        svg = render_chart(bubbles, "svg")
        xs = [float(m) for m in re.findall(r'cx="([^"]+)"', svg)]
        ys = [float(m) for m in re.findall(r'cy="([^"]+)"', svg)]
        for x, y in zip(xs, ys):
            # the diagonal runs from (margin, margin+plot) to (margin+plot, margin)
            assert x + y == pytest.approx(480.0, abs=1e-9)

    def test_radius_tracks_sqrt_count_exactly(self):
        bubbles = [Bubble(0.2, 0.2, 1), Bubble(0.8, 0.8, 4)]
        svg = render_chart(bubbles, "svg")
        radii = [float(m) for m in re.findall(r'(?<=\s)r="([^"]+)"', svg)]
        assert radii[1] == 2.0 * radii[0]

    def test_deterministic_bytes(self):
        rng = np.random.default_rng(3)
        recs = records(rng.random(100).tolist(), rng.integers(0, 2, 100).tolist())
        bubbles = build_bubbles(recs)
        assert render_chart(bubbles, "svg") == render_chart(bubbles, "svg")
        assert render_chart(bubbles, "csv") == render_chart(bubbles, "csv")

    def test_contains_reference_line_and_labels(self):
        svg = render_chart([Bubble(0.5, 0.5, 1)], "svg")
        assert "<line" in svg and "output probability" in svg and "observed accuracy" in svg

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            render_chart([], "svg")

    def test_unknown_format_rejected(self):
        with pytest.raises(InvalidValue):
            render_chart([Bubble(0.5, 0.5, 1)], "png")


class TestDegenerateRegime:
    def test_extreme_scores_concentrate_into_two_dominant_bubbles(self):
        # heavily overconfident scores produce two big clusters near 0 and 1
        cfg = SynthConfig(
            n=4000, seed=10, distortion=Distortion("overconfident", 25.0), latent=Latent("uniform")
        )
        recs = [PredictionRecord(ls.score, ls.label) for ls, _ in generate(cfg)]
        bubbles = build_bubbles(recs, grid_step=0.02)
        top_two = sorted(bubbles, key=lambda b: b.count, reverse=True)[:2]
        assert {round(b.probability, 2) for b in top_two} == {0.0, 1.0}
        assert sum(b.count for b in top_two) > 0.8 * len(recs)
        for b in sorted(bubbles, key=lambda b: b.count, reverse=True)[2:]:
            assert b.count < 0.05 * len(recs)
