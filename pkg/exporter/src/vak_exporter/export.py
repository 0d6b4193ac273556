"""Run a pretrained sequence-classification model over labeled texts.

Reads text examples (CSV with header ``id,text[,text2][,label]`` or JSONL
with the same keys), scores them in batches with any model loadable through
the transformers Auto classes, and writes a score file in the calibration
toolkit's interchange schema: CSV with header ``id,score,label,target``.

The default score is the raw positive-class logit; isotonic calibration is
invariant to monotone transforms of the score, so nothing is lost by skipping
the softmax.  ``--score probability`` emits the softmax probability instead.
Inference runs in evaluation mode, so output is deterministic for fixed
weights and inputs.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import NamedTuple, Sequence


class ExportError(Exception):
    """Malformed input, bad schema, or an unloadable model."""


class TextExample(NamedTuple):
    id: str
    text: str
    text2: str | None = None
    label: int | None = None


_CSV_HEADERS = (
    ["id", "text"],
    ["id", "text", "label"],
    ["id", "text", "text2"],
    ["id", "text", "text2", "label"],
)


def _check_examples(examples: list[TextExample]) -> list[TextExample]:
    seen = set()
    for i, ex in enumerate(examples):
        if not ex.id:
            raise ExportError(f"row {i}: empty id")
        if ex.id in seen:
            raise ExportError(f"row {i}: duplicate id {ex.id!r}")
        seen.add(ex.id)
        if not ex.text:
            raise ExportError(f"row {i} (id {ex.id!r}): empty text")
        if ex.label is not None and ex.label not in (0, 1):
            raise ExportError(f"row {i} (id {ex.id!r}): label {ex.label!r} not in {{0, 1}}")
    if not examples:
        raise ExportError("no examples to score")
    with_pair = [ex.text2 is not None for ex in examples]
    if any(with_pair) and not all(with_pair):
        raise ExportError("either every row carries text2 or none may")
    return examples


def read_examples(path) -> list[TextExample]:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return _check_examples(_read_jsonl(text))
    return _check_examples(_read_csv(text))


def _read_csv(text: str) -> list[TextExample]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ExportError("empty file, expected a header row") from None
    if header not in _CSV_HEADERS:
        raise ExportError(
            f"unexpected header {','.join(header)!r}; expected id,text[,text2][,label]"
        )
    has_pair = "text2" in header
    has_label = "label" in header
    out = []
    for cells in reader:
        if len(cells) != len(header):
            raise ExportError(f"line {reader.line_num}: expected {len(header)} fields")
        row = dict(zip(header, cells))
        label_cell = row.get("label", "")
        try:
            label = int(label_cell) if has_label and label_cell != "" else None
        except ValueError:
            raise ExportError(f"line {reader.line_num}: label {label_cell!r} is not an integer") from None
        text2 = row.get("text2") if has_pair and row.get("text2") != "" else None
        out.append(TextExample(id=row["id"], text=row["text"], text2=text2, label=label))
    return out


def _read_jsonl(text: str) -> list[TextExample]:
    out = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ExportError(f"line {line_no}: invalid JSON: {e.msg}") from None
        if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
            raise ExportError(f"line {line_no}: need an object with id and text")
        out.append(
            TextExample(
                id=str(obj["id"]),
                text=str(obj["text"]),
                text2=None if obj.get("text2") is None else str(obj["text2"]),
                label=obj.get("label"),
            )
        )
    return out


def _batches(seq: Sequence, size: int):
    for start in range(0, len(seq), size):
        yield seq[start : start + size]


def score_examples(
    model_name: str, examples: Sequence[TextExample], score: str = "logit", batch_size: int = 16
) -> list[float]:
    """Positive-class score per example, batched, in evaluation mode."""
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    if score not in ("logit", "probability"):
        raise ExportError(f"unknown score type {score!r}; use logit or probability")
    if batch_size < 1:
        raise ExportError(f"batch size must be >= 1, got {batch_size}")
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = AutoModelForSequenceClassification.from_pretrained(model_name)
    except Exception as e:
        raise ExportError(f"cannot load model {model_name!r}: {e}") from e
    model.eval()
    values: list[float] = []
    with torch.no_grad():
        for batch in _batches(list(examples), batch_size):
            texts = [ex.text for ex in batch]
            pairs = [ex.text2 for ex in batch] if batch[0].text2 is not None else None
            enc = tokenizer(
                texts, pairs, padding=True, truncation=True, max_length=512, return_tensors="pt"
            )
            logits = model(**enc).logits
            if logits.ndim != 2:
                raise ExportError(f"model emitted logits of shape {tuple(logits.shape)}")
            if logits.shape[1] == 1:  # single-logit head
                pos_logit = logits[:, 0]
                prob = torch.sigmoid(pos_logit)
            else:
                pos_logit = logits[:, 1]
                prob = torch.softmax(logits.float(), dim=1)[:, 1]
            chosen = pos_logit if score == "logit" else prob
            values.extend(float(v) for v in chosen)
    return values


def write_score_file(examples: Sequence[TextExample], scores: Sequence[float], path) -> None:
    """Emit the toolkit schema: CSV header id,score,label,target, LF endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "score", "label", "target"])
    for ex, value in zip(examples, scores):
        writer.writerow(
            [ex.id, format(value, ".17g"), "" if ex.label is None else ex.label, ""]
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def export_scores(
    model_name: str, in_path, out_path, score: str = "logit", batch_size: int = 16
) -> int:
    """Read, score, write; returns the number of rows written."""
    examples = read_examples(in_path)
    values = score_examples(model_name, examples, score=score, batch_size=batch_size)
    write_score_file(examples, values, out_path)
    return len(examples)
