"""Tiny transformer encoder with MLM and classification heads.

Dropout is pinned to zero so a seeded run is reproducible without
tracking RNG state through training and eval phases.
"""

import torch
from torch import nn

from .data import IGNORE_INDEX


class TinyEncoder(nn.Module):
    def __init__(self, vocab_size, hidden_size=64, num_layers=2, num_heads=4, max_positions=512):
        super().__init__()
        self.token_embedding = nn.Embedding(vocab_size, hidden_size)
        self.position_embedding = nn.Embedding(max_positions, hidden_size)
        self.norm = nn.LayerNorm(hidden_size)
        layer = nn.TransformerEncoderLayer(
            d_model=hidden_size,
            nhead=num_heads,
            dim_feedforward=4 * hidden_size,
            dropout=0.0,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers, enable_nested_tensor=False)
        self.max_positions = max_positions

    def forward(self, input_ids, attention_mask):
        if input_ids.shape[1] > self.max_positions:
            raise ValueError(
                f"sequence length {input_ids.shape[1]} exceeds max_positions {self.max_positions}"
            )
        positions = torch.arange(input_ids.shape[1], device=input_ids.device)
        hidden = self.token_embedding(input_ids) + self.position_embedding(positions)
        hidden = self.norm(hidden)
        return self.encoder(hidden, src_key_padding_mask=~attention_mask)


class MLMModel(nn.Module):
    def __init__(self, encoder: TinyEncoder, vocab_size: int):
        super().__init__()
        self.encoder = encoder
        self.lm_head = nn.Linear(encoder.token_embedding.embedding_dim, vocab_size)

    def forward(self, input_ids, attention_mask):
        return self.lm_head(self.encoder(input_ids, attention_mask))


class SequenceClassifier(nn.Module):
    """Mean-pools real positions and projects to class logits."""

    def __init__(self, encoder: TinyEncoder, num_classes: int):
        super().__init__()
        self.encoder = encoder
        self.head = nn.Linear(encoder.token_embedding.embedding_dim, num_classes)

    def forward(self, input_ids, attention_mask):
        hidden = self.encoder(input_ids, attention_mask)
        mask = attention_mask.unsqueeze(-1).to(hidden.dtype)
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
        return self.head(pooled)


def masked_lm_loss(logits, labels):
    """Cross entropy summed over labeled positions, divided by their count.

    A batch with no labeled positions returns exactly 0.0 (kept attached
    to the graph so callers can backward unconditionally).
    """
    count = (labels != IGNORE_INDEX).sum()
    if count.item() == 0:
        return logits.sum() * 0.0
    total = nn.functional.cross_entropy(
        logits.reshape(-1, logits.shape[-1]),
        labels.reshape(-1),
        ignore_index=IGNORE_INDEX,
        reduction="sum",
    )
    return total / count


def make_scheduler(optimizer, hint: str, total_steps: int):
    if hint == "constant":
        return torch.optim.lr_scheduler.LambdaLR(optimizer, lambda step: 1.0)
    if hint == "linear":
        span = max(total_steps, 1)
        return torch.optim.lr_scheduler.LambdaLR(
            optimizer, lambda step: max(0.0, 1.0 - step / span)
        )
    raise ValueError(f"unknown scheduler hint {hint!r}")
