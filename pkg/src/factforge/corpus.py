"""Corpus ingestion: PubHealth TSV, SciFact JSONL, and generic JSONL records.

Loaders normalize every source into (Document, ClaimRecord) pairs with binary
labels. Rows that cannot be parsed are skipped and reported, never fatal.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CapacityError, ContractViolationError, RowError
from .segmenter import SegmentationConfig, DEFAULT_CONFIG, segment

TRUE = "true"
FALSE = "false"

# PubHealth's 4-way labels collapse to binary; anything else is dropped.
_PUBHEALTH_LABELS = {"true": TRUE, "false": FALSE}
_SCIFACT_LABELS = {"SUPPORT": TRUE, "CONTRADICT": FALSE}


@dataclass
class Document:
    id: str
    text: str
    sentences: list[str] = field(default_factory=list)
    source: str = "generic"

    def ensure_segmented(self, cfg: SegmentationConfig = DEFAULT_CONFIG) -> None:
        if not self.sentences:
            self.sentences = segment(self.text, cfg)

    def word_count(self) -> int:
        return len(self.text.split())


@dataclass
class ClaimRecord:
    claim: str
    label: str
    doc_id: str

    def __post_init__(self):
        if not self.claim:
            raise ValueError("claim must be non-empty")
        if self.label not in (TRUE, FALSE):
            raise ValueError(f"label must be {TRUE!r} or {FALSE!r}, got {self.label!r}")


@dataclass
class CorpusStats:
    n_total: int = 0
    n_true: int = 0
    n_false: int = 0
    avg_doc_sentences: float = 0.0
    avg_doc_words: float = 0.0
    avg_claim_sentences: float = 0.0
    avg_claim_words: float = 0.0


# Generic grounding documents may arrive without a claim; every ClaimRecord
# that does exist carries a binary label.
Pair = tuple[Document, "ClaimRecord | None"]


@dataclass
class LoadResult:
    """Loaded pairs plus the audit trail of skipped rows."""

    pairs: list[Pair]
    errors: list[RowError] = field(default_factory=list)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def load_pubhealth(path: str | Path) -> LoadResult:
    """Load a PubHealth TSV split, keeping only true/false rows.

    Required columns: claim_id, claim, main_text, label. Rows labeled
    mixture or unproven are dropped; rows missing a required field are
    skipped and recorded in the error report.
    """
    path = Path(path)
    pairs: list[Pair] = []
    errors: list[RowError] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        for line_no, row in enumerate(reader, start=2):  # line 1 is the header
            claim_id = (row.get("claim_id") or "").strip()
            claim = (row.get("claim") or "").strip()
            main_text = (row.get("main_text") or "").strip()
            label = (row.get("label") or "").strip().lower()
            if not claim_id or not claim or not main_text or not label:
                errors.append(RowError(str(path), line_no, "missing required field"))
                continue
            if label not in _PUBHEALTH_LABELS:
                if label in ("mixture", "unproven"):
                    continue  # excluded by design, not an error
                errors.append(RowError(str(path), line_no, f"unknown label {label!r}"))
                continue
            if claim_id in seen_ids:
                errors.append(RowError(str(path), line_no, f"duplicate claim_id {claim_id!r}"))
                continue
            seen_ids.add(claim_id)
            doc = Document(id=claim_id, text=main_text, source="pubhealth")
            pairs.append((doc, ClaimRecord(claim, _PUBHEALTH_LABELS[label], claim_id)))
    return LoadResult(pairs, errors)


def load_scifact(corpus_path: str | Path, claims_path: str | Path) -> LoadResult:
    """Load SciFact abstracts and claims, keeping SUPPORT/CONTRADICT pairs.

    Abstract sentences are used directly as Document.sentences; one pair is
    emitted per (claim, labeled abstract). NEUTRAL annotations and claims
    referencing missing abstracts are skipped (the latter reported).
    """
    corpus_path = Path(corpus_path)
    claims_path = Path(claims_path)
    errors: list[RowError] = []

    docs: dict[str, Document] = {}
    for line_no, line in enumerate(corpus_path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            doc_id = str(rec["doc_id"])
            abstract = [s.strip() for s in rec["abstract"] if s.strip()]
            if not abstract:
                raise KeyError("abstract")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            errors.append(RowError(str(corpus_path), line_no, f"bad corpus row: {exc}"))
            continue
        if doc_id in docs:
            errors.append(RowError(str(corpus_path), line_no, f"duplicate doc_id {doc_id!r}"))
            continue
        docs[doc_id] = Document(
            id=doc_id,
            text=" ".join(abstract),
            sentences=abstract,
            source="scifact",
        )

    pairs: list[Pair] = []
    for line_no, line in enumerate(claims_path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            claim = rec["claim"].strip()
            evidence = rec.get("evidence") or {}
            if not claim:
                raise KeyError("claim")
        except (json.JSONDecodeError, KeyError, AttributeError) as exc:
            errors.append(RowError(str(claims_path), line_no, f"bad claim row: {exc}"))
            continue
        for doc_id, annotations in evidence.items():
            labels = {a.get("label") for a in annotations if a.get("label") in _SCIFACT_LABELS}
            if not labels:
                continue  # NEUTRAL-only annotation sets are excluded by design
            if len(labels) > 1:
                errors.append(
                    RowError(str(claims_path), line_no, f"conflicting labels for doc {doc_id}")
                )
                continue
            doc = docs.get(str(doc_id))
            if doc is None:
                errors.append(
                    RowError(str(claims_path), line_no, f"unknown abstract id {doc_id}")
                )
                continue
            verdict = _SCIFACT_LABELS[labels.pop()]
            pairs.append((doc, ClaimRecord(claim, verdict, doc.id)))
    return LoadResult(pairs, errors)


def load_generic(path: str | Path) -> LoadResult:
    """Load generic JSONL: {"id", "text", "claim": str|null, "label": str|null}."""
    path = Path(path)
    pairs: list[Pair] = []
    errors: list[RowError] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            doc_id = str(rec["id"])
            text = rec["text"]
            if not doc_id or not text:
                raise KeyError("id/text")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            errors.append(RowError(str(path), line_no, f"bad row: {exc}"))
            continue
        if doc_id in seen_ids:
            errors.append(RowError(str(path), line_no, f"duplicate id {doc_id!r}"))
            continue
        seen_ids.add(doc_id)
        doc = Document(id=doc_id, text=text, source="generic")
        claim = rec.get("claim")
        label = rec.get("label")
        if claim is None or label is None:
            # Unlabeled grounding document: usable for synthesis, not training.
            pairs.append((doc, None))
            continue
        if label not in (TRUE, FALSE):
            errors.append(RowError(str(path), line_no, f"unknown label {label!r}"))
            continue
        pairs.append((doc, ClaimRecord(claim, label, doc_id)))
    return LoadResult(pairs, errors)


def filter_by_length(
    docs: list[Document], min_excl: int = 3, max_excl: int = 40
) -> list[Document]:
    """Keep documents with strictly more than min_excl and strictly fewer
    than max_excl sentences, preserving order."""
    kept = []
    for doc in docs:
        if not doc.sentences:
            raise ContractViolationError(f"document {doc.id!r} has no sentences")
        if min_excl < len(doc.sentences) < max_excl:
            kept.append(doc)
    return kept


def filter_pairs_by_length(
    pairs: list[Pair], min_excl: int = 3, max_excl: int = 40
) -> list[Pair]:
    keep_ids = {d.id for d in filter_by_length([doc for doc, _ in pairs], min_excl, max_excl)}
    return [(doc, claim) for doc, claim in pairs if doc.id in keep_ids]


def select_balanced_subset(pairs: list[Pair], k: int, seed: int) -> list[Pair]:
    """Sample k/2 true and k/2 false pairs without replacement.

    Deterministic for a fixed seed; samples per label and interleaves
    true/false so the output is balanced under any prefix truncation.
    """
    if k % 2 != 0:
        raise ValueError(f"k must be even, got {k}")
    if k == 0:
        return []
    by_label: dict[str, list[Pair]] = {TRUE: [], FALSE: []}
    for pair in pairs:
        if pair[1] is not None:
            by_label[pair[1].label].append(pair)
    half = k // 2
    for label in (TRUE, FALSE):
        if len(by_label[label]) < half:
            raise CapacityError(label, half, len(by_label[label]))
    rng = random.Random(seed)
    chosen_true = rng.sample(by_label[TRUE], half)
    chosen_false = rng.sample(by_label[FALSE], half)
    out: list[Pair] = []
    for t, f in zip(chosen_true, chosen_false):
        out.append(t)
        out.append(f)
    return out


def compute_stats(pairs: list[Pair], cfg: SegmentationConfig = DEFAULT_CONFIG) -> CorpusStats:
    """Counts and means over labeled pairs; words are whitespace tokens."""
    labeled = [(d, c) for d, c in pairs if c is not None]
    if not labeled:
        return CorpusStats()
    n_true = sum(1 for _, c in labeled if c.label == TRUE)
    doc_sent = []
    doc_words = []
    claim_sent = []
    claim_words = []
    for doc, claim in labeled:
        doc.ensure_segmented(cfg)
        doc_sent.append(len(doc.sentences))
        doc_words.append(doc.word_count())
        claim_sent.append(len(segment(claim.claim, cfg)))
        claim_words.append(len(claim.claim.split()))
    n = len(labeled)
    return CorpusStats(
        n_total=n,
        n_true=n_true,
        n_false=n - n_true,
        avg_doc_sentences=sum(doc_sent) / n,
        avg_doc_words=sum(doc_words) / n,
        avg_claim_sentences=sum(claim_sent) / n,
        avg_claim_words=sum(claim_words) / n,
    )
