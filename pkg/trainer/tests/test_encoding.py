from __future__ import annotations

import pytest
from transformers import AutoTokenizer

from factforge_trainer.config import TrainingConfig
from factforge_trainer.encoding import EncodingError, PairEncoder


@pytest.fixture(scope="module")
def tokenizer(tiny_base_model):
    return AutoTokenizer.from_pretrained(tiny_base_model)


def test_defaults_match_reference_settings():
    cfg = TrainingConfig()
    assert cfg.epochs == 10
    assert cfg.learning_rate == 2e-5
    assert cfg.batch_size == 16
    assert cfg.weight_decay == 1e-2
    assert cfg.max_sequence_length == 512
    assert cfg.base_model == "allenai/scibert_scivocab_uncased"


def test_config_rejects_nonpositive_values():
    with pytest.raises(ValueError):
        TrainingConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainingConfig(learning_rate=-1e-5)


def test_short_pair_length_is_sum_plus_specials(tokenizer):
    encoder = PairEncoder(tokenizer, 512)
    claim = "alpha signal one"
    document = "the study recorded the signal"
    enc = encoder.encode(claim, document)
    n_claim = len(tokenizer.encode(claim, add_special_tokens=False))
    n_doc = len(tokenizer.encode(document, add_special_tokens=False))
    assert len(enc.input_ids) == n_claim + n_doc + 3
    assert all(m == 1 for m in enc.attention_mask)


def test_sequence_shape_cls_claim_sep_document_sep(tokenizer):
    encoder = PairEncoder(tokenizer, 512)
    enc = encoder.encode("alpha signal", "water dam river")
    tokens = tokenizer.convert_ids_to_tokens(enc.input_ids)
    assert tokens[0] == "[CLS]"
    sep_positions = [i for i, t in enumerate(tokens) if t == "[SEP]"]
    assert len(sep_positions) == 2
    assert tokens[1:sep_positions[0]] == ["alpha", "signal"]
    assert tokens[sep_positions[0] + 1 : sep_positions[1]] == ["water", "dam", "river"]


def test_long_document_truncates_tail_only(tokenizer):
    encoder = PairEncoder(tokenizer, 512)
    claim = "alpha signal detected"
    document = " ".join(["water"] * 600)  # 600 single-token words
    enc = encoder.encode(claim, document)
    assert len(enc.input_ids) == 512
    tokens = tokenizer.convert_ids_to_tokens(enc.input_ids)
    # claim segment intact
    first_sep = tokens.index("[SEP]")
    assert tokens[1:first_sep] == ["alpha", "signal", "detected"]
    # remaining budget filled by the document head
    doc_tokens = tokens[first_sep + 1 : -1]
    assert doc_tokens == ["water"] * (512 - 3 - 3)
    assert tokens[-1] == "[SEP]"


def test_claim_never_truncated_even_at_tiny_cap(tokenizer):
    encoder = PairEncoder(tokenizer, 10)
    claim = "alpha beta gamma delta"  # 4 tokens + 3 specials = 7 <= 10
    enc = encoder.encode(claim, " ".join(["water"] * 50))
    tokens = tokenizer.convert_ids_to_tokens(enc.input_ids)
    assert tokens[1:5] == ["alpha", "beta", "gamma", "delta"]
    assert len(enc.input_ids) == 10


def test_claim_exceeding_cap_is_input_error(tokenizer):
    encoder = PairEncoder(tokenizer, 8)
    with pytest.raises(EncodingError):
        encoder.encode("alpha beta gamma delta signal marker one two", "water")


def test_empty_claim_is_input_error(tokenizer):
    encoder = PairEncoder(tokenizer, 512)
    with pytest.raises(EncodingError):
        encoder.encode("", "water dam")
