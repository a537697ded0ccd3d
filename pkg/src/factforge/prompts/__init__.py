"""Prompt templates for the three model tasks.

Templates ship as plain text files with [document], [summary], [sentence]
and [fact] placeholders replaced verbatim. A directory of override files
(--prompt-dir) takes precedence over the packaged defaults.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

_TEMPLATE_FILES = {
    "summarize": "summarize.txt",
    "decompose": "decompose.txt",
    "entail": "entail.txt",
}


class PromptLibrary:
    def __init__(self, prompt_dir: str | Path | None = None):
        self._templates: dict[str, str] = {}
        for task, fname in _TEMPLATE_FILES.items():
            override = Path(prompt_dir) / fname if prompt_dir else None
            if override is not None and override.exists():
                self._templates[task] = override.read_text("utf-8")
            else:
                self._templates[task] = (
                    resources.files(__name__).joinpath(fname).read_text("utf-8")
                )

    def template(self, task: str) -> str:
        return self._templates[task]

    def summarize_prompt(self, document: str) -> str:
        return self._templates["summarize"].replace("[document]", document)

    def decompose_prompt(self, sentence: str) -> str:
        return self._templates["decompose"].replace("[summary]", sentence)

    def entail_prompt(self, sentence: str, fact: str) -> str:
        return (
            self._templates["entail"]
            .replace("[sentence]", sentence)
            .replace("[fact]", fact)
        )


DEFAULT_PROMPTS = PromptLibrary()
