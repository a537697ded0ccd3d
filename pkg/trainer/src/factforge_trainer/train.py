"""Fine-tuning loop: AdamW over cross-entropy on claim-document pairs."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn
from torch.utils.data import DataLoader, Dataset

from .config import TrainingConfig
from .data import LABELS, TrainRecord, load_training_set
from .encoding import PairEncoder
from .model import build_model, save_checkpoint

logger = logging.getLogger(__name__)

LOSS_CURVE_FILE = "loss_curve.json"


class ValidationError(ValueError):
    """The training set violates a precondition (empty or single-label)."""


@dataclass
class TrainResult:
    checkpoint_dir: Path
    epoch_losses: list[float]
    epoch_accuracies: list[float]


class _PairDataset(Dataset):
    def __init__(self, records: list[TrainRecord], encoder: PairEncoder):
        self.items = [
            encoder.encode(r.claim, r.text, r.label_index) for r in records
        ]

    def __len__(self):
        return len(self.items)

    def __getitem__(self, idx):
        return self.items[idx]


def _collate(batch, pad_token_id: int):
    width = max(len(item.input_ids) for item in batch)
    input_ids = torch.full((len(batch), width), pad_token_id, dtype=torch.long)
    attention = torch.zeros((len(batch), width), dtype=torch.long)
    labels = torch.zeros(len(batch), dtype=torch.long)
    for i, item in enumerate(batch):
        n = len(item.input_ids)
        input_ids[i, :n] = torch.tensor(item.input_ids, dtype=torch.long)
        attention[i, :n] = torch.tensor(item.attention_mask, dtype=torch.long)
        labels[i] = item.label_index
    return input_ids, attention, labels


def train(train_path: str | Path, cfg: TrainingConfig, out_dir: str | Path) -> TrainResult:
    """Fine-tune on an augmented-set JSONL file and save the final epoch.

    Raises ValidationError when the training set is empty or carries only
    one label.
    """
    records, _ = load_training_set(train_path)
    if not records:
        raise ValidationError(f"training set {train_path} has no usable records")
    present = {r.label_index for r in records}
    if len(present) < 2:
        only = LABELS[present.pop()]
        raise ValidationError(f"training set contains only {only!r} labels")

    torch.manual_seed(cfg.seed)
    model, tokenizer = build_model(cfg.base_model, cfg.dropout)
    encoder = PairEncoder(tokenizer, cfg.max_sequence_length)
    dataset = _PairDataset(records, encoder)
    generator = torch.Generator().manual_seed(cfg.seed)
    loader = DataLoader(
        dataset,
        batch_size=cfg.batch_size,
        shuffle=True,
        generator=generator,
        collate_fn=lambda b: _collate(b, tokenizer.pad_token_id),
    )
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
    )
    loss_fn = nn.CrossEntropyLoss()

    epoch_losses: list[float] = []
    epoch_accuracies: list[float] = []
    model.train()
    for epoch in range(1, cfg.epochs + 1):
        total_loss = 0.0
        n_correct = 0
        for input_ids, attention, labels in loader:
            optimizer.zero_grad()
            logits = model(input_ids, attention)
            loss = loss_fn(logits, labels)
            loss.backward()
            optimizer.step()
            total_loss += loss.item() * len(labels)
            n_correct += (logits.argmax(dim=1) == labels).sum().item()
        mean_loss = total_loss / len(dataset)
        accuracy = n_correct / len(dataset)
        epoch_losses.append(mean_loss)
        epoch_accuracies.append(accuracy)
        logger.info(
            "epoch %d/%d: mean loss %.4f, train accuracy %.3f",
            epoch, cfg.epochs, mean_loss, accuracy,
        )

    out_dir = Path(out_dir)
    meta = {
        "labels": list(LABELS),
        "max_sequence_length": cfg.max_sequence_length,
        "dropout": cfg.dropout,
        "config": cfg.to_dict(),
    }
    save_checkpoint(model, tokenizer, out_dir, meta)
    curve = {
        "epoch_losses": epoch_losses,
        "epoch_accuracies": epoch_accuracies,
    }
    (out_dir / LOSS_CURVE_FILE).write_text(json.dumps(curve, indent=2) + "\n", "utf-8")
    return TrainResult(out_dir, epoch_losses, epoch_accuracies)
