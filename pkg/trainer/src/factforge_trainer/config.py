"""Training configuration with the reference fine-tuning hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass, asdict

DEFAULT_BASE_MODEL = "allenai/scibert_scivocab_uncased"


@dataclass(frozen=True)
class TrainingConfig:
    base_model: str = DEFAULT_BASE_MODEL
    epochs: int = 10
    learning_rate: float = 2e-5
    batch_size: int = 16
    weight_decay: float = 1e-2
    max_sequence_length: int = 512
    dropout: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("epochs", "learning_rate", "batch_size", "weight_decay",
                     "max_sequence_length", "dropout"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return asdict(self)
