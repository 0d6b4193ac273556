"""Score-file ingestion, validation, and emission.

The interchange schema is one row per example: a unique string id, a raw
real-valued score (no [0,1] constraint), an optional binary label, and an
optional real-valued target in [0,1].  Two encodings carry it losslessly:

* CSV: UTF-8, header ``id,score,label,target``, LF line endings, ``.``
  decimal separator, floats printed with 17 significant digits.
* JSONL: one object per line with keys ``id``, ``score``, ``label``,
  ``target`` (missing values are null).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ._util import write_text_atomic
from .errors import DuplicateId, InvalidValue, MissingLabels, ParseError

FORMAT_VERSION = 1
_CSV_HEADERS = (["id", "score"], ["id", "score", "label"], ["id", "score", "label", "target"])


@dataclass(frozen=True)
class ScoreRow:
    id: str
    score: float
    label: int | None = None
    target: float | None = None


@dataclass
class ScoreFile:
    rows: list[ScoreRow]
    source: str = field(default="", compare=False)
    format_version: int = FORMAT_VERSION

    def __len__(self) -> int:
        return len(self.rows)


def _check_rows(rows: list[ScoreRow], lines: list[int]) -> None:
    seen: dict[str, int] = {}
    for row, line in zip(rows, lines):
        if not row.id:
            raise ParseError("empty id", line)
        if row.id in seen:
            raise DuplicateId(f"id {row.id!r} on line {line} already used on line {seen[row.id]}")
        seen[row.id] = line
        if not math.isfinite(row.score):
            raise ParseError(f"score {row.score!r} is not finite", line)
        if row.label is not None and row.label not in (0, 1):
            raise ParseError(f"label {row.label!r} not in {{0, 1}}", line)
        if row.target is not None and not (
            math.isfinite(row.target) and 0.0 <= row.target <= 1.0
        ):
            raise ParseError(f"target {row.target!r} outside [0, 1]", line)


def _parse_float(cell: str, what: str, line: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"{what} {cell!r} is not a number", line) from None


def _parse_label(cell: str, line: int):
    try:
        value = int(cell)
    except ValueError:
        raise ParseError(f"label {cell!r} is not an integer", line) from None
    return value


def _read_csv(text: str, path) -> ScoreFile:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file, expected a header row", 1) from None
    if header not in _CSV_HEADERS:
        raise ParseError(
            f"unexpected header {','.join(header)!r}; expected id,score[,label[,target]]", 1
        )
    rows: list[ScoreRow] = []
    lines: list[int] = []
    width = len(header)
    for cells in reader:
        line = reader.line_num
        if len(cells) != width:
            raise ParseError(f"expected {width} fields, found {len(cells)}", line)
        label = target = None
        if width > 2 and cells[2] != "":
            label = _parse_label(cells[2], line)
        if width > 3 and cells[3] != "":
            target = _parse_float(cells[3], "target", line)
        rows.append(
            ScoreRow(
                id=cells[0],
                score=_parse_float(cells[1], "score", line),
                label=label,
                target=target,
            )
        )
        lines.append(line)
    _check_rows(rows, lines)
    return ScoreFile(rows=rows, source=str(path))


def _read_jsonl(text: str, path) -> ScoreFile:
    rows: list[ScoreRow] = []
    lines: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line_no) from None
        if not isinstance(obj, dict):
            raise ParseError("each line must be a JSON object", line_no)
        unknown = set(obj) - {"id", "score", "label", "target"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", line_no)
        if "id" not in obj or "score" not in obj:
            raise ParseError("object needs at least id and score", line_no)
        if not isinstance(obj["id"], str):
            raise ParseError(f"id {obj['id']!r} is not a string", line_no)
        score = obj["score"]
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise ParseError(f"score {score!r} is not a number", line_no)
        label = obj.get("label")
        if label is not None and (isinstance(label, bool) or not isinstance(label, int)):
            raise ParseError(f"label {label!r} is not an integer", line_no)
        target = obj.get("target")
        if target is not None and (isinstance(target, bool) or not isinstance(target, (int, float))):
            raise ParseError(f"target {target!r} is not a number", line_no)
        rows.append(
            ScoreRow(
                id=obj["id"],
                score=float(score),
                label=label,
                target=None if target is None else float(target),
            )
        )
        lines.append(line_no)
    _check_rows(rows, lines)
    return ScoreFile(rows=rows, source=str(path))


def read_scores(path, require_labels: bool = False) -> ScoreFile:
    """Parse and validate a score file; the encoding is sniffed from content."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        sf = _read_jsonl(text, path)
    else:
        sf = _read_csv(text, path)
    if require_labels:
        for i, row in enumerate(sf.rows):
            if row.label is None:
                raise MissingLabels(f"row {i} (id {row.id!r}) has no label")
    return sf


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_scores(score_file: ScoreFile, path, format: str = "csv") -> None:
    """Emit CSV or JSONL; read_scores(write_scores(f)) == f."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "score", "label", "target"])
        for row in score_file.rows:
            writer.writerow(
                [
                    row.id,
                    _fmt(row.score),
                    "" if row.label is None else row.label,
                    "" if row.target is None else _fmt(row.target),
                ]
            )
        text = buf.getvalue()
    elif format == "jsonl":
        lines = [
            json.dumps(
                {"id": row.id, "score": row.score, "label": row.label, "target": row.target},
                ensure_ascii=False,
            )
            for row in score_file.rows
        ]
        text = "".join(line + "\n" for line in lines)
    else:
        raise InvalidValue(f"unknown score-file format {format!r}")
    try:
        write_text_atomic(path, text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
