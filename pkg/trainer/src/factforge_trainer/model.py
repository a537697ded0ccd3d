"""Encoder with a two-logit classification head, plus checkpoint I/O.

The pair representation is the final-layer hidden state at the [CLS]
position, passed through dropout and one linear layer. Checkpoints store the
encoder and tokenizer in their standard layouts next to the head weights.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch
from torch import nn
from transformers import AutoModel, AutoTokenizer

HEAD_FILE = "classifier_head.pt"
META_FILE = "trainer_meta.json"
ENCODER_DIR = "encoder"
TOKENIZER_DIR = "tokenizer"

N_CLASSES = 2


class FactCheckerModel(nn.Module):
    def __init__(self, encoder, dropout: float = 0.1):
        super().__init__()
        self.encoder = encoder
        self.dropout = nn.Dropout(dropout)
        self.classifier = nn.Linear(encoder.config.hidden_size, N_CLASSES)

    def forward(self, input_ids, attention_mask):
        hidden = self.encoder(input_ids=input_ids, attention_mask=attention_mask)
        cls_state = hidden.last_hidden_state[:, 0, :]
        return self.classifier(self.dropout(cls_state))


def build_model(base_model: str, dropout: float) -> tuple[FactCheckerModel, object]:
    encoder = AutoModel.from_pretrained(base_model)
    tokenizer = AutoTokenizer.from_pretrained(base_model)
    return FactCheckerModel(encoder, dropout), tokenizer


def save_checkpoint(model: FactCheckerModel, tokenizer, out_dir: str | Path, meta: dict) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.encoder.save_pretrained(out_dir / ENCODER_DIR)
    tokenizer.save_pretrained(out_dir / TOKENIZER_DIR)
    torch.save(model.classifier.state_dict(), out_dir / HEAD_FILE)
    (out_dir / META_FILE).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", "utf-8")
    return out_dir


def load_checkpoint(ckpt_dir: str | Path) -> tuple[FactCheckerModel, object, dict]:
    ckpt_dir = Path(ckpt_dir)
    meta = json.loads((ckpt_dir / META_FILE).read_text("utf-8"))
    encoder = AutoModel.from_pretrained(ckpt_dir / ENCODER_DIR)
    tokenizer = AutoTokenizer.from_pretrained(ckpt_dir / TOKENIZER_DIR)
    model = FactCheckerModel(encoder, meta.get("dropout", 0.1))
    state = torch.load(ckpt_dir / HEAD_FILE, map_location="cpu", weights_only=True)
    model.classifier.load_state_dict(state)
    model.eval()
    return model, tokenizer, meta
