"""Hallucination scanning for generated summaries.

A summary's atomic facts are tabulated against the source document's
sentences; any fact column with no supporting sentence at all is flagged.
A flagged fact is either fabricated or only inferable by combining several
sentences; both cases are reported as abnormal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

from .corpus import Document
from .decomposition import AtomicFact, Summary
from .errors import FactForgeError, ScanError
from .fact_table import EntailmentScorer, SentenceFactTable, build_table, unsupported_columns

logger = logging.getLogger(__name__)

VERDICT_CLEAN = "clean"
VERDICT_ABNORMAL = "abnormal"

Decomposer = Callable[[Summary], "list[AtomicFact]"]


@dataclass(frozen=True)
class FlaggedFact:
    fact_index: int
    fact_text: str


@dataclass
class ScanReport:
    doc_id: str
    summary_text: str
    flagged_facts: list[FlaggedFact]
    table: SentenceFactTable
    verdict: str

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "summary": self.summary_text,
            "verdict": self.verdict,
            "flagged": [
                {"fact_index": ff.fact_index, "fact": ff.fact_text}
                for ff in self.flagged_facts
            ],
            "table": self.table.to_record(),
        }


def scan(
    doc: Document,
    summary: Summary,
    scorer: EntailmentScorer,
    decomposer: Decomposer,
) -> ScanReport:
    """Flag summary facts that no single document sentence supports."""
    facts = decomposer(summary)
    if not facts:
        raise ScanError(f"doc {doc.id!r}: summary decomposed into zero facts")
    table = build_table(doc, facts, scorer)
    flagged = [
        FlaggedFact(c, table.facts[c]) for c in unsupported_columns(table)
    ]
    return ScanReport(
        doc_id=doc.id,
        summary_text=summary.text,
        flagged_facts=flagged,
        table=table,
        verdict=VERDICT_ABNORMAL if flagged else VERDICT_CLEAN,
    )


def batch_scan(
    pairs: Sequence[tuple[Document, Summary]],
    scorer: EntailmentScorer,
    decomposer: Decomposer,
) -> tuple[list[ScanReport], dict, list[str]]:
    """Scan every pair, collecting per-pair failures instead of aborting.

    Returns (reports in input order, {"n_scanned", "n_abnormal"}, errors).
    """
    reports: list[ScanReport] = []
    errors: list[str] = []
    for doc, summary in pairs:
        try:
            reports.append(scan(doc, summary, scorer, decomposer))
        except FactForgeError as exc:
            logger.warning("scan failed for doc %s: %s", doc.id, exc)
            errors.append(f"{doc.id}: {exc}")
    aggregate = {
        "n_scanned": len(reports),
        "n_abnormal": sum(1 for r in reports if r.verdict == VERDICT_ABNORMAL),
    }
    return reports, aggregate, errors
