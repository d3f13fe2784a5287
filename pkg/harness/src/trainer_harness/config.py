from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class HarnessConfig:
    """Settings for one pretrain + finetune run.

    Defaults mirror the upstream trainer: batch size 16, learning rate
    2e-5, weight decay 0.01, two pre-training epochs. The model stays
    tiny by construction; the caps below are hard limits, not hints.
    """

    dataset: Path
    sidecar: Path
    out_dir: Path = field(default_factory=lambda: Path("."))
    hidden_size: int = 64
    num_layers: int = 2
    num_heads: int = 4
    max_positions: int = 512
    epochs_pretrain: int = 2
    epochs_finetune: int = 4
    batch_size: int = 16
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    seed: int = 0

    def __post_init__(self):
        self.dataset = Path(self.dataset)
        self.sidecar = Path(self.sidecar)
        self.out_dir = Path(self.out_dir)
        if self.hidden_size <= 0 or self.hidden_size > 256:
            raise ValueError(f"hidden_size must be in 1..256, got {self.hidden_size}")
        if self.num_layers <= 0 or self.num_layers > 4:
            raise ValueError(f"num_layers must be in 1..4, got {self.num_layers}")
        if self.hidden_size % self.num_heads != 0:
            raise ValueError("hidden_size must be divisible by num_heads")
        if self.epochs_pretrain < 0:
            raise ValueError("epochs_pretrain must be non-negative")
        if not 0 <= self.epochs_finetune <= 4:
            raise ValueError(f"epochs_finetune must be in 0..4, got {self.epochs_finetune}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.max_positions < 2:
            raise ValueError("max_positions must be at least 2")
