"""Per-document sentence-fact entailment tables.

Rows are document sentences, columns are atomic facts, and each cell is a
boolean verdict on whether that single sentence fully supports that fact.
Cells are independent, so a scorer may batch or parallelize them freely.
"""

from __future__ import annotations

import json
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence

from .corpus import Document
from .decomposition import AtomicFact
from .errors import BoundsError, ContractViolationError, TableConstructionError
from .llm_backend import TASK_ENTAIL, LlmBackend, LlmRequest
from .prompts import DEFAULT_PROMPTS, PromptLibrary


class EntailmentScorer(Protocol):
    """Boolean verdict on a single (sentence, fact) pair."""

    scorer_id: str

    def scores(self, sentence: str, fact: str) -> bool: ...

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[bool]: ...


class CellScoringError(Exception):
    """A specific cell failed inside a batch; index points into the batch."""

    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"cell {index}: {cause}")


def score_cells(scorer: EntailmentScorer, pairs: Sequence[tuple[str, str]]) -> list[bool]:
    """Per-cell batch loop that tags failures with their batch index."""
    out = []
    for i, (sentence, fact) in enumerate(pairs):
        try:
            out.append(scorer.scores(sentence, fact))
        except Exception as exc:
            raise CellScoringError(i, exc) from exc
    return out


class LlmEntailmentScorer:
    """Scorer backed by the entail task of an LLM backend."""

    def __init__(
        self,
        backend: LlmBackend,
        model_id: str,
        prompts: PromptLibrary = DEFAULT_PROMPTS,
    ):
        self.backend = backend
        self.model_id = model_id
        self.prompts = prompts
        self.scorer_id = f"llm:{backend.name}:{model_id}"

    def scores(self, sentence: str, fact: str) -> bool:
        prompt = self.prompts.entail_prompt(sentence, fact)
        return self.backend.complete(LlmRequest(TASK_ENTAIL, prompt, self.model_id)).parsed

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[bool]:
        return score_cells(self, pairs)


class PredictionFileScorer:
    """Scorer backed by a trained classifier through the prediction file
    protocol: cells go out as {"id", "claim", "text"} lines (claim = fact,
    text = single sentence) and come back as {"id", "predicted"} lines.
    """

    def __init__(self, predict: Callable[[Path, Path], None], scorer_id: str = "classifier"):
        self._predict = predict
        self.scorer_id = scorer_id

    def scores(self, sentence: str, fact: str) -> bool:
        return self.score_batch([(sentence, fact)])[0]

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[bool]:
        if not pairs:
            return []
        with tempfile.TemporaryDirectory(prefix="factforge-cells-") as tmp:
            pairs_path = Path(tmp) / "pairs.jsonl"
            out_path = Path(tmp) / "predictions.jsonl"
            with pairs_path.open("w", encoding="utf-8") as fh:
                for i, (sentence, fact) in enumerate(pairs):
                    fh.write(
                        json.dumps(
                            {"id": str(i), "claim": fact, "text": sentence},
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
            self._predict(pairs_path, out_path)
            verdicts: dict[str, bool] = {}
            for line in out_path.read_text("utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    verdicts[rec["id"]] = rec["predicted"] == "true"
        missing = [i for i in range(len(pairs)) if str(i) not in verdicts]
        if missing:
            raise ContractViolationError(
                f"predictor returned no verdict for cells {missing[:5]}"
            )
        return [verdicts[str(i)] for i in range(len(pairs))]


def command_predictor(command_template: str) -> Callable[[Path, Path], None]:
    """Adapt a shell command with {pairs} and {out} placeholders (for example
    the trainer's batch-prediction CLI) into a PredictionFileScorer callable."""

    def run(pairs_path: Path, out_path: Path) -> None:
        cmd = command_template.format(pairs=pairs_path, out=out_path)
        subprocess.run(cmd, shell=True, check=True)

    return run


@dataclass
class SentenceFactTable:
    doc_id: str
    sentences: list[str]
    facts: list[str]
    matrix: list[list[bool]]
    scorer_id: str

    def __post_init__(self):
        if len(self.matrix) != len(self.sentences):
            raise ContractViolationError(
                f"table {self.doc_id}: {len(self.matrix)} rows != {len(self.sentences)} sentences"
            )
        for row in self.matrix:
            if len(row) != len(self.facts):
                raise ContractViolationError(
                    f"table {self.doc_id}: row width {len(row)} != {len(self.facts)} facts"
                )
            if not all(isinstance(v, bool) for v in row):
                raise ContractViolationError(f"table {self.doc_id}: non-boolean cell")

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    @property
    def n_facts(self) -> int:
        return len(self.facts)

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "sentences": list(self.sentences),
            "facts": list(self.facts),
            "matrix": [list(row) for row in self.matrix],
            "scorer_id": self.scorer_id,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SentenceFactTable":
        return cls(
            doc_id=record["doc_id"],
            sentences=list(record["sentences"]),
            facts=list(record["facts"]),
            matrix=[[bool(v) for v in row] for row in record["matrix"]],
            scorer_id=record["scorer_id"],
        )


def build_table(
    doc: Document, facts: Sequence[AtomicFact], scorer: EntailmentScorer
) -> SentenceFactTable:
    """Score every (document sentence, fact) cell exactly once."""
    if not facts:
        raise ContractViolationError(f"document {doc.id!r} has no facts to tabulate")
    if not doc.sentences:
        raise ContractViolationError(f"document {doc.id!r} is not segmented")
    fact_texts = [f.text for f in facts]
    n_facts = len(fact_texts)
    cells = [(s, f) for s in doc.sentences for f in fact_texts]
    try:
        verdicts = scorer.score_batch(cells)
    except CellScoringError as exc:
        row, col = divmod(exc.index, n_facts)
        raise TableConstructionError(row, col, exc.cause) from exc
    matrix = [
        [bool(v) for v in verdicts[r * n_facts : (r + 1) * n_facts]]
        for r in range(len(doc.sentences))
    ]
    return SentenceFactTable(
        doc_id=doc.id,
        sentences=list(doc.sentences),
        facts=fact_texts,
        matrix=matrix,
        scorer_id=scorer.scorer_id,
    )


def supports_any(table: SentenceFactTable, selected_rows: Iterable[int], fact_col: int) -> bool:
    """OR of the fact column over the selected sentence rows; empty -> False."""
    if not 0 <= fact_col < table.n_facts:
        raise BoundsError(f"fact column {fact_col} outside [0, {table.n_facts})")
    result = False
    for r in selected_rows:
        if not 0 <= r < table.n_sentences:
            raise BoundsError(f"sentence row {r} outside [0, {table.n_sentences})")
        if table.matrix[r][fact_col]:
            result = True
    return result


def unsupported_columns(table: SentenceFactTable) -> list[int]:
    """Fact columns whose every cell is false, in ascending order."""
    return [
        c for c in range(table.n_facts) if not any(row[c] for row in table.matrix)
    ]


def write_tables(tables: Iterable[SentenceFactTable], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for table in tables:
            fh.write(json.dumps(table.to_record(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_tables(path: str | Path) -> list[SentenceFactTable]:
    tables = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            tables.append(SentenceFactTable.from_record(json.loads(line)))
    return tables
