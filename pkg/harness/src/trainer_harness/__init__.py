from .config import HarnessConfig
from .data import (
    Batch,
    DatasetFormatError,
    Example,
    IGNORE_INDEX,
    MaskedDataset,
    Sidecar,
    load_masked_dataset,
    read_vocab,
)
from .model import (
    MLMModel,
    SequenceClassifier,
    TinyEncoder,
    make_scheduler,
    masked_lm_loss,
)
from .run import run_toy_pipeline

__version__ = "0.1.0"

__all__ = [
    "Batch",
    "DatasetFormatError",
    "Example",
    "HarnessConfig",
    "IGNORE_INDEX",
    "MLMModel",
    "MaskedDataset",
    "SequenceClassifier",
    "Sidecar",
    "TinyEncoder",
    "load_masked_dataset",
    "make_scheduler",
    "masked_lm_loss",
    "read_vocab",
    "run_toy_pipeline",
]
