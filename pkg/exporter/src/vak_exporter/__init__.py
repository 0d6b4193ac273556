"""Bridge from pretrained sequence-classification models to the calibration toolkit."""

__version__ = "0.1.0"

from .export import (
    ExportError,
    TextExample,
    export_scores,
    read_examples,
    score_examples,
    write_score_file,
)

__all__ = [
    "__version__",
    "ExportError",
    "TextExample",
    "export_scores",
    "read_examples",
    "score_examples",
    "write_score_file",
]
