"""Claim-document pair encoding.

Pairs are encoded as "[CLS] claim [SEP] document [SEP]". The claim segment
is never truncated; when the pair exceeds the length cap, tokens are dropped
from the document's tail only.
"""

from __future__ import annotations

from dataclasses import dataclass


class EncodingError(ValueError):
    """The claim alone does not fit within the sequence length cap."""


@dataclass(frozen=True)
class EncodedPair:
    input_ids: list[int]
    attention_mask: list[int]
    label_index: int | None = None


class PairEncoder:
    def __init__(self, tokenizer, max_sequence_length: int):
        self.tokenizer = tokenizer
        self.max_sequence_length = max_sequence_length

    def claim_budget(self, claim: str) -> int:
        """Token count the claim occupies, excluding special positions."""
        return len(self.tokenizer.encode(claim, add_special_tokens=False))

    def encode(self, claim: str, document: str, label_index: int | None = None) -> EncodedPair:
        if not claim:
            raise EncodingError("claim must be non-empty")
        # [CLS] claim [SEP] document [SEP] reserves three special positions.
        if self.claim_budget(claim) + 3 > self.max_sequence_length:
            raise EncodingError(
                f"claim occupies more than the {self.max_sequence_length}-token cap by itself"
            )
        enc = self.tokenizer(
            claim,
            document,
            truncation="only_second",
            max_length=self.max_sequence_length,
        )
        return EncodedPair(enc["input_ids"], enc["attention_mask"], label_index)
