"""Command-line frontend.

Subcommands cover the whole pipeline: split a labeled score file, fit a
calibrator, predict multiprobabilities, evaluate, draw reliability bubble
charts, synthesize benchmark scores, and compare raw against calibrated
predictions.  Commands communicate only through files on disk; every run
emits a ``<output>.manifest`` JSON sidecar sufficient to replay it.

Exit codes: 0 success, 1 validation error, 2 I/O error.  Diagnostics go to
stderr; data goes to files or stdout.  ``VAK_SEED`` is the fallback seed
when a command that needs one is not given ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from ._util import write_text_atomic
from .chart import build_bubbles, render_chart
from .dataio import ScoreFile, ScoreRow, read_scores, write_scores
from .errors import InvalidValue, MissingLabels, ToolkitError
from .ivap import (
    DEFAULT_PROPER_FRACTION,
    IvapCalibrator,
    LabeledScore,
    fit_ivap,
    split_training,
)
from .metrics import MetricsReport, PredictionRecord, compute_report
from .synth import Distortion, Latent, SynthConfig, generate_score_file

_PREDICTION_HEADER = ["id", "p0", "p1", "merged", "label", "target"]


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_manifest(anchor, command, argv, inputs, outputs, parameters, seed=None):
    doc = {
        "manifest_version": 1,
        "command": command,
        "toolkit_version": __version__,
        "argv": list(argv),
        "inputs": inputs,
        "outputs": outputs,
        "parameters": parameters,
        "seed": seed,
        "created_utc": _utc_now(),
    }
    write_text_atomic(str(anchor) + ".manifest", json.dumps(doc, indent=2) + "\n")


def _resolve_seed(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("VAK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvalidValue(f"VAK_SEED={env!r} is not an integer") from None
    return 0


def _parse_distortion(text: str) -> Distortion:
    kind, _, param = text.partition(":")
    try:
        if kind == "identity":
            if param:
                raise ValueError
            return Distortion("identity")
        if not param:
            raise ValueError
        return Distortion(kind, float(param))
    except (ValueError, ToolkitError):
        raise argparse.ArgumentTypeError(
            f"invalid distortion {text!r}; use identity, overconfident:A (A>1) "
            "or underconfident:A (0<A<1)"
        ) from None


def _parse_latent(text: str) -> Latent:
    parts = text.split(":")
    try:
        if parts[0] == "uniform" and len(parts) == 1:
            return Latent("uniform")
        if parts[0] == "bimodal":
            if len(parts) == 1:
                return Latent("bimodal")
            if len(parts) == 3:
                return Latent("bimodal", mix=float(parts[1]), spread=float(parts[2]))
        raise ValueError
    except (ValueError, ToolkitError):
        raise argparse.ArgumentTypeError(
            f"invalid latent law {text!r}; use uniform or bimodal[:MIX:SPREAD]"
        ) from None


def _records_from_file(path) -> tuple[list[PredictionRecord], list[str]]:
    """Read predictions with labels from a prediction file or a score file.

    Prediction files (written by ``vak predict``) supply the merged column;
    plain score files must hold probabilities in the score column.
    """
    text = Path(path).read_text(encoding="utf-8")
    first = text.split("\n", 1)[0].strip()
    if first == ",".join(_PREDICTION_HEADER):
        return _read_prediction_file(text, path)
    sf = read_scores(path, require_labels=True)
    records = []
    ids = []
    for row in sf.rows:
        if not 0.0 <= row.score <= 1.0:
            raise InvalidValue(
                f"{path}: score {row.score} for id {row.id!r} is not a probability; "
                "run the scores through a calibrator first"
            )
        records.append(
            PredictionRecord(probability=row.score, label=row.label, degree_target=row.target)
        )
        ids.append(row.id)
    return records, ids


def _read_prediction_file(text: str, path) -> tuple[list[PredictionRecord], list[str]]:
    reader = csv.reader(io.StringIO(text))
    next(reader)  # header, checked by caller
    records = []
    ids = []
    for cells in reader:
        if len(cells) != len(_PREDICTION_HEADER):
            raise InvalidValue(f"{path}: malformed prediction row on line {reader.line_num}")
        row_id, _p0, _p1, merged, label, target = cells
        if label == "":
            raise MissingLabels(f"{path}: id {row_id!r} has no label")
        records.append(
            PredictionRecord(
                probability=float(merged),
                label=int(label),
                degree_target=float(target) if target != "" else None,
            )
        )
        ids.append(row_id)
    if not records:
        raise InvalidValue(f"{path}: no prediction rows")
    return records, ids


def _scorefile_format(path) -> str:
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson")) else "csv"


# ---------------------------------------------------------------- commands


def _cmd_split(args) -> int:
    seed = _resolve_seed(args.seed)
    sf = read_scores(args.scores)
    result = split_training(sf.rows, args.fraction, seed)
    fmt = _scorefile_format(args.out_proper)
    write_scores(ScoreFile(rows=result.proper, source=sf.source), args.out_proper, fmt)
    write_scores(
        ScoreFile(rows=result.calibration, source=sf.source),
        args.out_calibration,
        _scorefile_format(args.out_calibration),
    )
    _write_manifest(
        args.out_proper,
        "split",
        [
            "split",
            args.scores,
            args.out_proper,
            args.out_calibration,
            "--fraction",
            repr(args.fraction),
            "--seed",
            str(seed),
        ],
        inputs={"scores": args.scores},
        outputs={"proper": args.out_proper, "calibration": args.out_calibration},
        parameters={"fraction": args.fraction},
        seed=seed,
    )
    print(
        f"split {len(sf.rows)} rows into {len(result.proper)} proper / "
        f"{len(result.calibration)} calibration (seed {seed})",
        file=sys.stderr,
    )
    return 0


def _cmd_calibrate(args) -> int:
    sf = read_scores(args.calibration_scores, require_labels=True)
    calibrator = fit_ivap(
        [LabeledScore(r.score, r.label) for r in sf.rows],
        provenance={"source": str(args.calibration_scores), "rows": len(sf.rows)},
    )
    calibrator.save(args.out_model)
    _write_manifest(
        args.out_model,
        "calibrate",
        ["calibrate", args.calibration_scores, args.out_model],
        inputs={"calibration_scores": args.calibration_scores},
        outputs={"model": args.out_model},
        parameters={"calibration_size": calibrator.calibration_size},
    )
    print(f"fitted calibrator on {calibrator.calibration_size} examples", file=sys.stderr)
    return 0


def _cmd_predict(args) -> int:
    calibrator = IvapCalibrator.load(args.model)
    sf = read_scores(args.test_scores)
    p0, p1, merged = calibrator.predict_arrays([r.score for r in sf.rows])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_PREDICTION_HEADER)
    for row, a, b, c in zip(sf.rows, p0, p1, merged):
        writer.writerow(
            [
                row.id,
                _fmt(a),
                _fmt(b),
                _fmt(c),
                "" if row.label is None else row.label,
                "" if row.target is None else _fmt(row.target),
            ]
        )
    write_text_atomic(args.out, buf.getvalue())
    _write_manifest(
        args.out,
        "predict",
        ["predict", args.model, args.test_scores, args.out],
        inputs={"model": args.model, "test_scores": args.test_scores},
        outputs={"predictions": args.out},
        parameters={"rows": len(sf.rows)},
    )
    print(f"predicted {len(sf.rows)} rows", file=sys.stderr)
    return 0


def _cmd_evaluate(args) -> int:
    records, _ = _records_from_file(args.predictions)
    report = compute_report(
        records, num_bins=args.bins, threshold=args.threshold, include_degree=args.degree
    )
    text = report.to_text()
    sys.stdout.write(text)
    if args.out:
        write_text_atomic(args.out, text)
    if args.json:
        write_text_atomic(args.json, json.dumps(report.to_dict(), indent=2) + "\n")
    anchor = args.out or args.json or args.predictions
    _write_manifest(
        anchor,
        "evaluate",
        ["evaluate", args.predictions, "--bins", str(args.bins), "--threshold", repr(args.threshold)]
        + (["--degree"] if args.degree else [])
        + (["--out", args.out] if args.out else [])
        + (["--json", args.json] if args.json else []),
        inputs={"predictions": args.predictions},
        outputs={k: v for k, v in (("out", args.out), ("json", args.json)) if v},
        parameters={"bins": args.bins, "threshold": args.threshold, "degree": args.degree},
    )
    return 0


def _cmd_chart(args) -> int:
    records, _ = _records_from_file(args.predictions)
    bubbles = build_bubbles(records, grid_step=args.grid)
    out = str(args.out)
    if out.endswith(".svg"):
        fmt = "svg"
    elif out.endswith(".csv"):
        fmt = "csv"
    else:
        raise InvalidValue(f"chart output must end in .svg or .csv, got {out!r}")
    write_text_atomic(args.out, render_chart(bubbles, fmt))
    _write_manifest(
        args.out,
        "chart",
        ["chart", args.predictions, args.out, "--grid", repr(args.grid)],
        inputs={"predictions": args.predictions},
        outputs={"chart": args.out},
        parameters={"grid": args.grid, "format": fmt, "bubbles": len(bubbles)},
    )
    print(f"wrote {len(bubbles)} bubbles to {args.out}", file=sys.stderr)
    return 0


def _cmd_synth(args) -> int:
    seed = _resolve_seed(args.seed)
    config = SynthConfig(n=args.n, seed=seed, distortion=args.distortion, latent=args.latent)
    sf = generate_score_file(config)
    write_scores(sf, args.out, _scorefile_format(args.out))
    distortion_text = (
        "identity"
        if args.distortion.kind == "identity"
        else f"{args.distortion.kind}:{args.distortion.a!r}"
    )
    latent_text = (
        "uniform"
        if args.latent.kind == "uniform"
        else f"bimodal:{args.latent.mix!r}:{args.latent.spread!r}"
    )
    _write_manifest(
        args.out,
        "synth",
        [
            "synth",
            args.out,
            "--n",
            str(args.n),
            "--seed",
            str(seed),
            "--distortion",
            distortion_text,
            "--latent",
            latent_text,
        ],
        inputs={},
        outputs={"scores": args.out},
        parameters={"n": args.n, "distortion": distortion_text, "latent": latent_text},
        seed=seed,
    )
    print(f"generated {args.n} rows (seed {seed})", file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    raw_records, raw_ids = _records_from_file(args.raw)
    ivap_records, ivap_ids = _records_from_file(args.calibrated)
    if set(raw_ids) != set(ivap_ids):
        only_raw = sorted(set(raw_ids) - set(ivap_ids))[:3]
        only_cal = sorted(set(ivap_ids) - set(raw_ids))[:3]
        raise InvalidValue(
            f"id sets differ between {args.raw} and {args.calibrated} "
            f"(e.g. only raw: {only_raw}, only calibrated: {only_cal})"
        )
    by_id = dict(zip(ivap_ids, ivap_records))
    ivap_aligned = [by_id[i] for i in raw_ids]
    for rid, a, b in zip(raw_ids, raw_records, ivap_aligned):
        if a.label != b.label:
            raise InvalidValue(f"label mismatch for id {rid!r}")
    raw_report = compute_report(raw_records, num_bins=args.bins, threshold=args.threshold)
    ivap_report = compute_report(ivap_aligned, num_bins=args.bins, threshold=args.threshold)
    lines = [f"n {raw_report.n}"]
    for name in ("ece", "log_loss", "brier", "macro_f1"):
        rv = getattr(raw_report, name)
        cv = getattr(ivap_report, name)
        lines += [
            f"raw_{name} {rv:.6f}",
            f"calibrated_{name} {cv:.6f}",
            f"delta_{name} {cv - rv:+.6f}",
        ]
    lines += [
        f"raw_decile_occupancy {raw_report.decile_occupancy}",
        f"calibrated_decile_occupancy {ivap_report.decile_occupancy}",
    ]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        write_text_atomic(args.out, text)
    if args.json:
        doc = {
            "n": raw_report.n,
            "raw": raw_report.to_dict(),
            "calibrated": ivap_report.to_dict(),
            "delta": {
                name: getattr(ivap_report, name) - getattr(raw_report, name)
                for name in ("ece", "log_loss", "brier", "macro_f1")
            },
        }
        write_text_atomic(args.json, json.dumps(doc, indent=2) + "\n")
    anchor = args.out or args.json or args.raw
    _write_manifest(
        anchor,
        "compare",
        ["compare", args.raw, args.calibrated, "--bins", str(args.bins),
         "--threshold", repr(args.threshold)]
        + (["--out", args.out] if args.out else [])
        + (["--json", args.json] if args.json else []),
        inputs={"raw": args.raw, "calibrated": args.calibrated},
        outputs={k: v for k, v in (("out", args.out), ("json", args.json)) if v},
        parameters={"bins": args.bins, "threshold": args.threshold},
    )
    return 0


def _cmd_replay(args) -> int:
    doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    if doc.get("manifest_version") != 1:
        raise InvalidValue(f"{args.manifest}: unsupported manifest version")
    argv = doc.get("argv")
    if not isinstance(argv, list) or not argv:
        raise InvalidValue(f"{args.manifest}: manifest has no argv to replay")
    print(f"replaying: vak {' '.join(argv)}", file=sys.stderr)
    return main(argv)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vak",
        description="Venn-ABERS calibration toolkit for binary classifier scores.",
    )
    parser.add_argument("--version", action="version", version=f"vak {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="shuffle and split a score file into proper/calibration parts")
    p.add_argument("scores")
    p.add_argument("out_proper")
    p.add_argument("out_calibration")
    p.add_argument("--fraction", type=float, default=DEFAULT_PROPER_FRACTION,
                   help="proper-training share of the rows (default 5/6, a 75:15 ratio)")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("calibrate", help="fit a calibrator on labeled scores")
    p.add_argument("calibration_scores")
    p.add_argument("out_model")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("predict", help="multiprobability predictions for a score file")
    p.add_argument("model")
    p.add_argument("test_scores")
    p.add_argument("out")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="calibration and accuracy metrics for predictions")
    p.add_argument("predictions")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--degree", action="store_true",
                   help="also report RMSE and R^2 against the target column")
    p.add_argument("--out", default=None, help="write the text report here as well")
    p.add_argument("--json", default=None, help="write a structured report here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("chart", help="reliability bubble chart (SVG or CSV by extension)")
    p.add_argument("predictions")
    p.add_argument("out")
    p.add_argument("--grid", type=float, default=0.02)
    p.set_defaults(func=_cmd_chart)

    p = sub.add_parser("synth", help="generate synthetic scores with known truth")
    p.add_argument("out")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--distortion", type=_parse_distortion, default=Distortion("identity"))
    p.add_argument("--latent", type=_parse_latent, default=Latent("uniform"))
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("compare", help="side-by-side metrics for raw vs calibrated predictions")
    p.add_argument("raw")
    p.add_argument("calibrated")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.set_defaults(func=_cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
