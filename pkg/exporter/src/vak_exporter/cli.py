"""Command-line entry: score a text file and write a toolkit score file."""

from __future__ import annotations

import argparse
import sys

from .export import ExportError, export_scores


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vak-export",
        description="Score texts with a pretrained sequence-classification model "
        "and write a score file the calibration toolkit can ingest.",
    )
    parser.add_argument("input", help="CSV (id,text[,text2][,label]) or JSONL of texts")
    parser.add_argument("output", help="score file to write (CSV: id,score,label,target)")
    parser.add_argument("--model", required=True, help="model name or local model directory")
    parser.add_argument("--score", choices=["logit", "probability"], default="logit",
                        help="positive-class raw logit (default) or softmax probability")
    parser.add_argument("--batch-size", type=int, default=16)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        n = export_scores(
            args.model, args.input, args.output, score=args.score, batch_size=args.batch_size
        )
    except ExportError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2
    print(f"scored {n} examples with {args.model}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
