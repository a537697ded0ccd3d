"""Rule-based sentence segmentation.

Splits whitespace-normalized text after ``.``, ``?`` or ``!`` when the next
token starts with an uppercase letter or an opening quote. Boundaries are
suppressed after known abbreviations ("Dr.", "e.g.", ...) and after
single-letter initials ("J. Smith"). Joining the output with single spaces
reproduces the normalized input exactly, so no characters are lost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import EmptyInputError

_BOUNDARY = re.compile(r'[.?!]["\')\]]*\s')
_INITIAL = re.compile(r"^[A-Z]\.$")
_OPENERS = '"\'“‘('


def _default_abbreviations() -> frozenset[str]:
    text = resources.files("factforge.data").joinpath("abbreviations.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation list, one entry per line, for --abbrev-file."""
    entries = []
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if line:
            if not line.endswith("."):
                raise ValueError(f"abbreviation {line!r} must end with a period")
            entries.append(line.lower())
    return frozenset(entries)


@dataclass(frozen=True)
class SegmentationConfig:
    abbreviations: frozenset[str] = field(default_factory=_default_abbreviations)
    min_sentence_chars: int = 2

    def __post_init__(self):
        if self.min_sentence_chars < 1:
            raise ValueError("min_sentence_chars must be >= 1")
        for abbr in self.abbreviations:
            if not abbr.endswith("."):
                raise ValueError(f"abbreviation {abbr!r} must end with a period")


DEFAULT_CONFIG = SegmentationConfig()


def normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


def _word_before(text: str, end: int) -> str:
    """The whitespace-delimited token ending at position ``end`` (exclusive)."""
    start = text.rfind(" ", 0, end)
    return text[start + 1 : end]


def segment(text: str, cfg: SegmentationConfig = DEFAULT_CONFIG) -> list[str]:
    """Split raw text into an ordered list of sentences.

    Raises EmptyInputError if the text is empty after whitespace
    normalization.
    """
    normalized = normalize_whitespace(text)
    if not normalized:
        raise EmptyInputError("cannot segment empty or whitespace-only text")

    breaks: list[int] = []  # index of first char after each boundary's space
    for m in _BOUNDARY.finditer(normalized):
        after = m.end()
        if after >= len(normalized):
            continue
        nxt = normalized[after]
        if not (nxt.isupper() or nxt in _OPENERS):
            continue
        # The candidate terminator is the punctuation char itself; the word
        # carrying it decides whether this is a real boundary.
        word = _word_before(normalized, m.end() - 1)
        bare = word.rstrip('"\')]')
        if bare.lower() in cfg.abbreviations or _INITIAL.match(bare):
            continue
        breaks.append(after)

    pieces = []
    prev = 0
    for b in breaks:
        pieces.append(normalized[prev : b - 1])  # drop the separating space
        prev = b
    pieces.append(normalized[prev:])

    # Fragments below the minimum length attach to the preceding sentence so
    # stray punctuation never becomes a sentence of its own.
    sentences: list[str] = []
    for piece in pieces:
        if sentences and len(piece) < cfg.min_sentence_chars:
            sentences[-1] = sentences[-1] + " " + piece
        else:
            sentences.append(piece)
    # A too-short leading fragment has no predecessor; merge it forward.
    if len(sentences) > 1 and len(sentences[0]) < cfg.min_sentence_chars:
        sentences[0:2] = [sentences[0] + " " + sentences[1]]
    return sentences
