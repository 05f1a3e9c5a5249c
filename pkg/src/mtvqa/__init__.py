"""mtvqa: multi-task reformatting and desk-scale training for
question-answering corpora over images."""

from . import autodiff, corpus, datasets, harness, models, reports, textenc
from .errors import ConfigError, FormatError, MtvqaError, ShapeError, TrainingError

__version__ = "0.1.0"

__all__ = [
    "autodiff", "corpus", "datasets", "harness", "models", "reports", "textenc",
    "ConfigError", "FormatError", "MtvqaError", "ShapeError", "TrainingError",
    "__version__",
]
