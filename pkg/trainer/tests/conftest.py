from __future__ import annotations

import json
from pathlib import Path

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

# Every word used by the test fixtures, so the tiny WordPiece vocab covers
# them all and no fixture token degrades to [UNK].
FIXTURE_WORDS = sorted(
    """
    alpha beta gamma delta signal marker present absent detected missing
    study trial result clearly recorded the a water dam river bridge holds
    gates open closed report one two three four five six seven eight nine
    ten city town crew site sample level high low rose fell steady reading
    """.split()
)

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


@pytest.fixture(scope="session")
def tiny_base_model(tmp_path_factory) -> str:
    """Local random-initialized BERT-architecture base model + tokenizer."""
    base = tmp_path_factory.mktemp("tiny-base")
    vocab = SPECIALS + ["."] + FIXTURE_WORDS
    (base / "vocab.txt").write_text("\n".join(vocab) + "\n", "utf-8")
    tokenizer = BertTokenizer(str(base / "vocab.txt"))
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=48,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=96,
        max_position_embeddings=128,
    )
    BertModel(config).save_pretrained(base)
    tokenizer.save_pretrained(base)
    return str(base)


def write_jsonl(path: Path, records: list[dict]) -> Path:
    path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n", "utf-8"
    )
    return path


def smoke_training_records() -> list[dict]:
    """32 learnable instances: 'present' claims are true, 'absent' false."""
    fillers = ["one", "two", "three", "four", "five", "six", "seven", "eight"]
    records = []
    for i in range(16):
        filler = fillers[i % len(fillers)]
        records.append(
            {
                "text": f"the crew recorded a {filler} signal at the site.",
                "claim": f"signal present {filler}.",
                "label": "true",
                "origin": "synthetic",
            }
        )
        records.append(
            {
                "text": f"the crew recorded a {filler} signal at the site.",
                "claim": f"signal absent {filler}.",
                "label": "false",
                "origin": "synthetic",
            }
        )
    return records[:32]


def separable_toy_records() -> list[dict]:
    """20 instances, linearly separable on the alpha/beta claim token."""
    fillers = ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"]
    records = []
    for filler in fillers:
        records.append(
            {
                "text": "the study recorded the signal clearly.",
                "claim": f"alpha signal {filler}.",
                "label": "true",
            }
        )
        records.append(
            {
                "text": "the study recorded the signal clearly.",
                "claim": f"beta signal {filler}.",
                "label": "false",
            }
        )
    return records
