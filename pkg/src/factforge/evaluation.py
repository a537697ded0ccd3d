"""Precision/recall/F1 scoring with "true" as the positive class, plus an
internal-consistency check for transcribed (P, R, F) result triples."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import TRUE
from .errors import InputError, UnknownReferenceError

logger = logging.getLogger(__name__)

POSITIVE_CLASS = TRUE


@dataclass
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    positive_class: str = POSITIVE_CLASS
    missing_gold_ids: tuple[str, ...] = ()
    warnings: list[str] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "positive_class": self.positive_class,
            "missing_gold_ids": list(self.missing_gold_ids),
            "warnings": list(self.warnings),
        }


def _safe_ratio(num: int, den: int, name: str, warnings: list[str]) -> float:
    if den == 0:
        warnings.append(f"{name} denominator is zero; reporting 0.0")
        return 0.0
    return num / den


def harmonic_f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def score(
    predictions: Sequence[Mapping[str, str]],
    gold: Sequence[Mapping[str, str]],
) -> EvalReport:
    """Confusion counts and P/R/F1 over prediction ids matched to gold ids.

    Gold ids without a prediction are reported on the result, never silently
    dropped. Duplicate ids raise InputError; a prediction whose id is absent
    from gold raises UnknownReferenceError.
    """
    gold_by_id: dict[str, str] = {}
    for rec in gold:
        rid = rec["id"]
        if rid in gold_by_id:
            raise InputError(f"duplicate gold id {rid!r}")
        gold_by_id[rid] = rec["label"]
    pred_by_id: dict[str, str] = {}
    for rec in predictions:
        rid = rec["id"]
        if rid in pred_by_id:
            raise InputError(f"duplicate prediction id {rid!r}")
        if rid not in gold_by_id:
            raise UnknownReferenceError(f"prediction id {rid!r} has no gold label")
        pred_by_id[rid] = rec["predicted"]

    tp = fp = fn = tn = 0
    for rid, predicted in pred_by_id.items():
        actual = gold_by_id[rid]
        if predicted == POSITIVE_CLASS:
            if actual == POSITIVE_CLASS:
                tp += 1
            else:
                fp += 1
        else:
            if actual == POSITIVE_CLASS:
                fn += 1
            else:
                tn += 1

    missing = tuple(rid for rid in gold_by_id if rid not in pred_by_id)
    warnings: list[str] = []
    if missing:
        warnings.append(f"{len(missing)} gold ids have no prediction")
        logger.warning("scoring: %d gold ids have no prediction", len(missing))
    precision = _safe_ratio(tp, tp + fp, "precision", warnings)
    recall = _safe_ratio(tp, tp + fn, "recall", warnings)
    return EvalReport(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        f1=harmonic_f1(precision, recall),
        missing_gold_ids=missing,
        warnings=warnings,
    )


@dataclass(frozen=True)
class ConsistencyViolation:
    index: int
    precision: float
    recall: float
    reported_f1: float
    expected_f1: float

    @property
    def delta(self) -> float:
        return abs(self.reported_f1 - self.expected_f1)


def consistency_check(
    report_rows: Sequence[tuple[float, float, float]],
    tolerance: float = 0.001,
) -> list[ConsistencyViolation]:
    """Flag (P, R, F) triples whose F strays from 2PR/(P+R) beyond tolerance.

    Intended for validating transcriptions of published result grids, where
    rounding to three decimals can move F by up to about a thousandth.
    """
    violations = []
    for i, (p, r, f) in enumerate(report_rows):
        for name, v in (("precision", p), ("recall", r), ("f1", f)):
            if not 0.0 <= v <= 1.0:
                raise InputError(f"row {i}: {name} {v} outside [0, 1]")
        expected = harmonic_f1(p, r)
        if abs(f - expected) > tolerance:
            violations.append(ConsistencyViolation(i, p, r, f, expected))
    return violations


def format_comparison(
    row_labels: Sequence[str],
    group_names: Sequence[str],
    triples: Mapping[str, Mapping[str, tuple[float, float, float]]],
) -> str:
    """Aligned text grid: one row per label, P/R/F columns per group."""
    header_1 = [" " * 12] + [f"{name:^23}" for name in group_names]
    header_2 = ["proportion".ljust(12)] + [
        f"{'P':>7}{'R':>8}{'F':>8}" for _ in group_names
    ]
    lines = ["".join(header_1).rstrip(), "".join(header_2)]
    for label in row_labels:
        cells = [f"{label:<12}"]
        for name in group_names:
            triple = triples.get(name, {}).get(label)
            if triple is None:
                cells.append(f"{'-':>7}{'-':>8}{'-':>8}")
            else:
                p, r, f = triple
                cells.append(f"{p:>7.3f}{r:>8.3f}{f:>8.3f}")
        lines.append("".join(cells))
    return "\n".join(lines)


def read_predictions(path: str | Path) -> list[dict]:
    return [
        json.loads(line)
        for line in Path(path).read_text("utf-8").splitlines()
        if line.strip()
    ]


def read_gold(path: str | Path) -> list[dict]:
    """Gold labels from JSONL lines carrying at least {"id", "label"}."""
    out = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            rec = json.loads(line)
            out.append({"id": rec["id"], "label": rec["label"]})
    return out
