from __future__ import annotations

from pathlib import Path

import pytest

from factforge.corpus import Document
from factforge.fact_table import SentenceFactTable
from factforge.llm_backend import LlmBackend, MockTransport, ResponseCache

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def mock_backend(tmp_path) -> LlmBackend:
    return LlmBackend(MockTransport(), ResponseCache(tmp_path / "cache"))


@pytest.fixture
def dam_doc() -> Document:
    return Document(
        id="dam",
        text="The dam holds river water for the dry season. Engineers inspect the spillway gates monthly.",
        sentences=[
            "The dam holds river water for the dry season.",
            "Engineers inspect the spillway gates monthly.",
        ],
    )


def make_table(doc_id: str, matrix: list[list[bool]]) -> SentenceFactTable:
    """Table with placeholder text whose support pattern is the given matrix."""
    n_rows = len(matrix)
    n_cols = len(matrix[0])
    return SentenceFactTable(
        doc_id=doc_id,
        sentences=[f"Sentence number {r} stands here." for r in range(n_rows)],
        facts=[f"Fact number {c} stands here." for c in range(n_cols)],
        matrix=matrix,
        scorer_id="fixture",
    )
