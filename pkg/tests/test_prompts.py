from __future__ import annotations

from factforge.prompts import DEFAULT_PROMPTS, PromptLibrary


def test_placeholders_replaced_verbatim():
    doc = "Line one.\nLine two with [brackets] kept."
    prompt = DEFAULT_PROMPTS.summarize_prompt(doc)
    assert doc in prompt
    assert "[document]" not in prompt


def test_decompose_prompt_carries_worked_examples():
    prompt = DEFAULT_PROMPTS.decompose_prompt("Something happened.")
    assert "Example1," in prompt
    assert "Aspirin reduces fever and thins blood." in prompt
    assert prompt.count("Sentence:") >= 5  # four examples plus the input slot
    assert "Something happened." in prompt


def test_entail_prompt_has_both_slots():
    prompt = DEFAULT_PROMPTS.entail_prompt("The dam holds.", "Water is held.")
    assert "Sentence:The dam holds." in prompt
    assert "Fact:Water is held." in prompt


def test_prompt_dir_partial_override(tmp_path):
    (tmp_path / "summarize.txt").write_text(
        "Document:[document]\nPlease generate a summary differently.\n"
        'Please respond **only** with a JSON object in the following format:\n'
        '{\n  "summary": "..."\n}\n',
        "utf-8",
    )
    lib = PromptLibrary(tmp_path)
    assert "differently" in lib.summarize_prompt("X.")
    # non-overridden templates fall back to the packaged defaults
    assert lib.decompose_prompt("Y.") == DEFAULT_PROMPTS.decompose_prompt("Y.")
