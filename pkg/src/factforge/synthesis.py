"""Synthetic instance generation by proportional sentence sampling.

For each instance, a fixed share of a document's sentences is drawn without
replacement, re-joined in document order, and paired with one atomic fact as
the claim. The label is true exactly when at least one selected sentence
supports that fact in the sentence-fact table.

Randomness is split per (seed, doc_id, instance ordinal), so results are
reproducible regardless of how tables are batched or parallelized.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import FALSE, TRUE, Pair
from .errors import ContractViolationError
from .fact_table import SentenceFactTable, supports_any

FACT_SELECTION_UNIFORM = "uniform"
FACT_SELECTION_BALANCE = "balance_target"

# balance_target re-draws the fact when the running label split leaves this
# band, at most this many times per instance.
_BALANCE_BAND = 0.55
_BALANCE_MAX_REDRAWS = 10


@dataclass(frozen=True)
class SynthesisConfig:
    proportion_pct: int
    instances_per_document: int = 1
    seed: int = 0
    fact_selection: str = FACT_SELECTION_UNIFORM

    def __post_init__(self):
        if not 0 <= self.proportion_pct <= 100:
            raise ValueError(f"proportion_pct {self.proportion_pct} outside [0, 100]")
        if self.instances_per_document < 1:
            raise ValueError("instances_per_document must be >= 1")
        if self.fact_selection not in (FACT_SELECTION_UNIFORM, FACT_SELECTION_BALANCE):
            raise ValueError(f"unknown fact_selection {self.fact_selection!r}")


@dataclass(frozen=True)
class SyntheticInstance:
    id: str
    doc_id: str
    text: str
    claim: str
    label: str
    selected_sentence_indices: tuple[int, ...]
    fact_index: int
    proportion_pct: int
    seed: int

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "doc_id": self.doc_id,
            "text": self.text,
            "claim": self.claim,
            "label": self.label,
            "selected_sentence_indices": list(self.selected_sentence_indices),
            "fact_index": self.fact_index,
            "proportion_pct": self.proportion_pct,
            "seed": self.seed,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SyntheticInstance":
        return cls(
            id=record["id"],
            doc_id=record["doc_id"],
            text=record["text"],
            claim=record["claim"],
            label=record["label"],
            selected_sentence_indices=tuple(record["selected_sentence_indices"]),
            fact_index=record["fact_index"],
            proportion_pct=record["proportion_pct"],
            seed=record["seed"],
        )


def sample_size(n_sentences: int, proportion_pct: int) -> int:
    """Number of sentences to draw: round-half-up of n*p/100, floored at 1."""
    if n_sentences < 1:
        raise ValueError("n_sentences must be >= 1")
    # Integer arithmetic keeps the rounding exact (no float .5 artifacts).
    return max(1, (n_sentences * proportion_pct + 50) // 100)


class LabelBalancer:
    """Running label histogram used by the balance_target selection mode."""

    def __init__(self):
        self.counts = {TRUE: 0, FALSE: 0}

    def record(self, label: str) -> None:
        self.counts[label] += 1

    def minority_label(self) -> str | None:
        """The label to prefer next, or None while the split stays in band."""
        total = self.counts[TRUE] + self.counts[FALSE]
        if total == 0:
            return None
        if self.counts[TRUE] / total > _BALANCE_BAND:
            return FALSE
        if self.counts[FALSE] / total > _BALANCE_BAND:
            return TRUE
        return None


def _instance_rng(seed: int, doc_id: str, ordinal: int) -> random.Random:
    # String seeding hashes via sha512 inside random.Random, which is stable
    # across processes and platforms.
    return random.Random(f"{seed}:{doc_id}:{ordinal}")


def synthesize(
    table: SentenceFactTable,
    cfg: SynthesisConfig,
    balancer: LabelBalancer | None = None,
) -> list[SyntheticInstance]:
    """Generate cfg.instances_per_document instances from one table.

    proportion_pct == 0 is the no-synthesis baseline and yields no instances.
    """
    if table.n_facts < 1:
        raise ContractViolationError(f"table {table.doc_id} has no fact columns")
    if table.n_sentences < 1:
        raise ContractViolationError(f"table {table.doc_id} has no sentences")
    if cfg.proportion_pct == 0:
        return []

    instances = []
    k = sample_size(table.n_sentences, cfg.proportion_pct)
    for ordinal in range(cfg.instances_per_document):
        rng = _instance_rng(cfg.seed, table.doc_id, ordinal)
        indices = tuple(sorted(rng.sample(range(table.n_sentences), k)))
        fact_index = rng.randrange(table.n_facts)
        label = TRUE if supports_any(table, indices, fact_index) else FALSE
        if cfg.fact_selection == FACT_SELECTION_BALANCE and balancer is not None:
            prefer = balancer.minority_label()
            redraws = 0
            while prefer is not None and label != prefer and redraws < _BALANCE_MAX_REDRAWS:
                fact_index = rng.randrange(table.n_facts)
                label = TRUE if supports_any(table, indices, fact_index) else FALSE
                redraws += 1
        if balancer is not None:
            balancer.record(label)
        instances.append(
            SyntheticInstance(
                id=f"{table.doc_id}:p{cfg.proportion_pct}:{ordinal}",
                doc_id=table.doc_id,
                text=" ".join(table.sentences[i] for i in indices),
                claim=table.facts[fact_index],
                label=label,
                selected_sentence_indices=indices,
                fact_index=fact_index,
                proportion_pct=cfg.proportion_pct,
                seed=cfg.seed,
            )
        )
    return instances


def synthesize_corpus(
    tables: Sequence[SentenceFactTable], cfg: SynthesisConfig
) -> list[SyntheticInstance]:
    """Synthesize over many tables in input order.

    balance_target keeps one running histogram across the whole corpus, so
    this path is sequential by design; the default uniform mode stays
    embarrassingly parallel.
    """
    balancer = LabelBalancer() if cfg.fact_selection == FACT_SELECTION_BALANCE else None
    out: list[SyntheticInstance] = []
    for table in tables:
        out.extend(synthesize(table, cfg, balancer))
    return out


@dataclass(frozen=True)
class AugmentedRecord:
    text: str
    claim: str
    label: str
    origin: str  # "original" or "synthetic"

    def to_record(self) -> dict:
        return {
            "text": self.text,
            "claim": self.claim,
            "label": self.label,
            "origin": self.origin,
        }


def build_augmented_set(
    original: Sequence[Pair],
    synthetic: Sequence[SyntheticInstance],
    seed: int = 0,
) -> list[AugmentedRecord]:
    """Merge original pairs with synthetic instances into one training set.

    Originals use the full document text. With no synthetic instances the
    original set passes through untouched (the 0% baseline); otherwise the
    concatenated list gets one seeded shuffle.
    """
    records = [
        AugmentedRecord(doc.text, claim.claim, claim.label, "original")
        for doc, claim in original
        if claim is not None
    ]
    if not synthetic:
        return records
    records.extend(
        AugmentedRecord(inst.text, inst.claim, inst.label, "synthetic")
        for inst in synthetic
    )
    random.Random(f"{seed}:augment").shuffle(records)
    return records


def write_instances(instances: Iterable[SyntheticInstance], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_record(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_instances(path: str | Path) -> list[SyntheticInstance]:
    return [
        SyntheticInstance.from_record(json.loads(line))
        for line in Path(path).read_text("utf-8").splitlines()
        if line.strip()
    ]


def write_augmented(records: Iterable[AugmentedRecord], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_record(), ensure_ascii=False) + "\n")
            n += 1
    return n
