"""JSONL input handling for training sets and prediction pairs.

Training records come from augmented-set files: {"text", "claim", "label"}
(extra keys such as "origin" are ignored). Prediction pairs carry
{"id", "claim", "text"}. Malformed lines are collected, never fatal.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

LABELS = ("false", "true")  # index 1 is the positive class
LABEL_TO_INDEX = {label: i for i, label in enumerate(LABELS)}


@dataclass(frozen=True)
class TrainRecord:
    claim: str
    text: str
    label_index: int


@dataclass(frozen=True)
class PairRecord:
    id: str
    claim: str
    text: str


def load_training_set(path: str | Path) -> tuple[list[TrainRecord], list[str]]:
    records: list[TrainRecord] = []
    errors: list[str] = []
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            label = rec["label"]
            if label not in LABEL_TO_INDEX:
                raise ValueError(f"unknown label {label!r}")
            claim, text = rec["claim"], rec["text"]
            if not claim or not text:
                raise ValueError("empty claim or text")
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            errors.append(f"{path}:{line_no}: {exc}")
            continue
        records.append(TrainRecord(claim, text, LABEL_TO_INDEX[label]))
    for err in errors:
        logger.warning("skipped training line: %s", err)
    return records, errors


def load_pairs(path: str | Path) -> tuple[list[PairRecord], list[str]]:
    pairs: list[PairRecord] = []
    errors: list[str] = []
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            pair = PairRecord(str(rec["id"]), rec["claim"], rec["text"])
            if not pair.claim:
                raise ValueError("empty claim")
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            errors.append(f"{path}:{line_no}: {exc}")
            continue
        pairs.append(pair)
    for err in errors:
        logger.warning("skipped pair line: %s", err)
    return pairs, errors
