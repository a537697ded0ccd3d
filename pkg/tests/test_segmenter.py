from __future__ import annotations

import random

import pytest

from factforge.errors import EmptyInputError
from factforge.segmenter import (
    SegmentationConfig,
    load_abbreviations,
    normalize_whitespace,
    segment,
)


def test_two_plain_sentences():
    assert segment("A claim. Another claim.") == ["A claim.", "Another claim."]


def test_abbreviation_guard():
    assert segment("Dr. Smith agreed. It worked.") == ["Dr. Smith agreed.", "It worked."]


def test_initial_guard():
    assert segment("Nurse J. Kim arrived. Work began.") == [
        "Nurse J. Kim arrived.",
        "Work began.",
    ]


def test_question_and_exclamation_boundaries():
    assert segment("Did it help? It did! Great news followed.") == [
        "Did it help?",
        "It did!",
        "Great news followed.",
    ]


def test_quote_opening_boundary():
    assert segment('She stopped. "We can do better," she said.') == [
        "She stopped.",
        '"We can do better," she said.',
    ]


def test_no_boundary_before_lowercase():
    # Decimal-free ellipsis into a lowercase continuation stays together.
    assert segment("It cost 4. dollars were scarce.") == ["It cost 4. dollars were scarce."]


def test_twenty_sentence_fixture(data_dir):
    # Boundary count in clinic20.txt was tallied by hand when the fixture was
    # written: 19 boundaries, 20 sentences, with abbreviation, initial and
    # quote traps that must not split.
    text = (data_dir / "clinic20.txt").read_text("utf-8")
    sentences = segment(text)
    assert len(sentences) == 20
    assert sentences[0] == "Dr. Patel opened the clinic at dawn."
    assert sentences[4] == '"We can do better," she said.'
    assert sentences[8] == "He had trained at St. Mary Hospital."
    assert sentences[11] == "Did the new filters help?"
    assert sentences[16] == "Not one file was lost!"
    assert sentences[19] == "The clinic reopened fully in March."


def test_lossless_coverage_on_fixture(data_dir):
    text = (data_dir / "clinic20.txt").read_text("utf-8")
    assert " ".join(segment(text)) == normalize_whitespace(text)


def test_lossless_coverage_randomized():
    # Property: joining with single spaces always reproduces the normalized
    # input, whatever mix of words, punctuation and whitespace comes in.
    rng = random.Random(99)
    vocab = ["alpha", "Beta", "gamma.", "Delta!", "eps?", "Dr.", "J.", '"Quote."', "x"]
    for _ in range(300):
        words = [rng.choice(vocab) for _ in range(rng.randint(1, 40))]
        ws = rng.choice([" ", "  ", "\n", "\t "])
        text = ws.join(words)
        sentences = segment(text)
        assert " ".join(sentences) == normalize_whitespace(text)
        assert all(s for s in sentences)


def test_determinism():
    text = "One thing happened. Then another! Did it end? Yes."
    assert segment(text) == segment(text)


def test_empty_input_raises():
    with pytest.raises(EmptyInputError):
        segment("   \n\t ")


def test_short_fragment_merges_into_predecessor():
    cfg = SegmentationConfig(min_sentence_chars=10)
    out = segment("The meeting ended early. Ok. Everyone left the room.", cfg)
    assert out == ["The meeting ended early. Ok.", "Everyone left the room."]


def test_abbreviation_file_override(tmp_path):
    path = tmp_path / "abbrev.txt"
    path.write_text("Dr.\nFoo.\n", "utf-8")
    abbrevs = load_abbreviations(path)
    cfg = SegmentationConfig(abbreviations=abbrevs)
    assert segment("Foo. Bar arrived. Done now.", cfg) == ["Foo. Bar arrived.", "Done now."]


def test_abbreviation_file_rejects_missing_period(tmp_path):
    path = tmp_path / "abbrev.txt"
    path.write_text("Dr\n", "utf-8")
    with pytest.raises(ValueError):
        load_abbreviations(path)


def test_config_rejects_zero_min_chars():
    with pytest.raises(ValueError):
        SegmentationConfig(min_sentence_chars=0)
