"""Batch prediction over {"id", "claim", "text"} pairs.

Output lines carry {"id", "predicted", "p_true"} in input order, suitable
both for metric scoring and for filling entailment-table cells (claim = the
fact, text = a single sentence).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch

from .data import load_pairs
from .encoding import PairEncoder
from .model import load_checkpoint

logger = logging.getLogger(__name__)


def predict(
    ckpt_dir: str | Path,
    pairs_path: str | Path,
    out_path: str | Path,
    batch_size: int = 32,
) -> int:
    """Write one prediction line per parseable input pair; returns the count."""
    model, tokenizer, meta = load_checkpoint(ckpt_dir)
    encoder = PairEncoder(tokenizer, meta["max_sequence_length"])
    idx_true = meta["labels"].index("true")
    pairs, _ = load_pairs(pairs_path)
    model.eval()

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with out_path.open("w", encoding="utf-8") as fh, torch.no_grad():
        for start in range(0, len(pairs), batch_size):
            chunk = pairs[start : start + batch_size]
            encoded = [encoder.encode(p.claim, p.text) for p in chunk]
            width = max(len(e.input_ids) for e in encoded)
            input_ids = torch.full(
                (len(chunk), width), tokenizer.pad_token_id, dtype=torch.long
            )
            attention = torch.zeros((len(chunk), width), dtype=torch.long)
            for i, e in enumerate(encoded):
                input_ids[i, : len(e.input_ids)] = torch.tensor(e.input_ids)
                attention[i, : len(e.attention_mask)] = torch.tensor(e.attention_mask)
            probs = torch.softmax(model(input_ids, attention), dim=1)
            for pair, row in zip(chunk, probs):
                p_true = row[idx_true].item()
                predicted = "true" if p_true >= 1.0 - p_true else "false"
                fh.write(
                    json.dumps(
                        {"id": pair.id, "predicted": predicted, "p_true": p_true},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                n += 1
    logger.info("wrote %d predictions to %s", n, out_path)
    return n
