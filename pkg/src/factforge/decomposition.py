"""Summary generation and atomic-fact extraction.

A document is summarized in one model call; each summary sentence is then
decomposed into atomic facts in its own call, so one fact never straddles
sentence boundaries. Facts keep their source sentence index and are
deduplicated case-insensitively within the document.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .corpus import Document
from .errors import FactForgeError
from .llm_backend import TASK_DECOMPOSE, TASK_SUMMARIZE, LlmBackend, LlmRequest
from .prompts import DEFAULT_PROMPTS, PromptLibrary
from .segmenter import DEFAULT_CONFIG, SegmentationConfig, segment

logger = logging.getLogger(__name__)

MIN_SUMMARY_SENTENCES = 3


@dataclass
class Summary:
    doc_id: str
    text: str
    sentences: list[str]
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class AtomicFact:
    id: int
    text: str
    source_summary_sentence: int


class DocumentTaskError(FactForgeError):
    """Backend or parse failure annotated with the document it came from."""

    def __init__(self, doc_id: str, cause: Exception, sentence_index: int | None = None):
        self.doc_id = doc_id
        self.cause = cause
        self.sentence_index = sentence_index
        where = f"doc {doc_id!r}"
        if sentence_index is not None:
            where += f", sentence {sentence_index}"
        super().__init__(f"{where}: {cause}")


def summarize(
    doc: Document,
    backend: LlmBackend,
    model_id: str,
    prompts: PromptLibrary = DEFAULT_PROMPTS,
    seg_cfg: SegmentationConfig = DEFAULT_CONFIG,
) -> Summary:
    """Produce a segmented summary of one document."""
    prompt = prompts.summarize_prompt(doc.text)
    try:
        response = backend.complete(LlmRequest(TASK_SUMMARIZE, prompt, model_id))
        text = response.parsed
        sentences = segment(text, seg_cfg)
    except FactForgeError as exc:
        raise DocumentTaskError(doc.id, exc) from exc
    warnings = []
    if len(sentences) < MIN_SUMMARY_SENTENCES:
        # The prompt asks for at least three sentences; shorter output is
        # accepted but recorded.
        msg = f"summary has {len(sentences)} sentences (expected >= {MIN_SUMMARY_SENTENCES})"
        logger.warning("doc %s: %s", doc.id, msg)
        warnings.append(msg)
    return Summary(doc_id=doc.id, text=text, sentences=sentences, warnings=warnings)


def decompose(
    summary: Summary,
    backend: LlmBackend,
    model_id: str,
    prompts: PromptLibrary = DEFAULT_PROMPTS,
) -> list[AtomicFact]:
    """Decompose every summary sentence into atomic facts.

    Facts are concatenated in sentence order; duplicate fact strings
    (case-insensitive) keep only their first occurrence, and fact ids are
    contiguous from zero.
    """
    if not summary.sentences:
        raise DocumentTaskError(summary.doc_id, ValueError("summary has no sentences"))
    facts: list[AtomicFact] = []
    seen: set[str] = set()
    for idx, sentence in enumerate(summary.sentences):
        prompt = prompts.decompose_prompt(sentence)
        try:
            response = backend.complete(LlmRequest(TASK_DECOMPOSE, prompt, model_id))
        except FactForgeError as exc:
            raise DocumentTaskError(summary.doc_id, exc, sentence_index=idx) from exc
        for fact_text in response.parsed:
            fact_text = fact_text.strip()
            key = fact_text.lower()
            if key in seen:
                continue
            seen.add(key)
            facts.append(AtomicFact(len(facts), fact_text, idx))
    return facts
