"""JSON Schemas for every JSONL artifact the pipeline emits.

Each stage validates its own output lines on write; the same schemas back
the test suite's end-to-end artifact checks.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

_LABEL = {"type": "string", "enum": ["true", "false"]}
_STRING_LIST = {"type": "array", "items": {"type": "string"}}

TABLE_SCHEMA = {
    "type": "object",
    "required": ["doc_id", "sentences", "facts", "matrix", "scorer_id"],
    "additionalProperties": False,
    "properties": {
        "doc_id": {"type": "string", "minLength": 1},
        "sentences": {**_STRING_LIST, "minItems": 1},
        "facts": {**_STRING_LIST, "minItems": 1},
        "matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "boolean"}},
        },
        "scorer_id": {"type": "string", "minLength": 1},
    },
}

SCHEMAS: dict[str, dict] = {
    "ingest": {
        "type": "object",
        "required": ["id", "text", "sentences", "claim", "label", "source"],
        "additionalProperties": False,
        "properties": {
            "id": {"type": "string", "minLength": 1},
            "text": {"type": "string", "minLength": 1},
            "sentences": {**_STRING_LIST, "minItems": 1},
            "claim": {"type": ["string", "null"]},
            "label": {"oneOf": [_LABEL, {"type": "null"}]},
            "source": {"type": "string", "enum": ["pubhealth", "scifact", "generic"]},
        },
    },
    "summarize": {
        "type": "object",
        "required": ["doc_id", "summary", "sentences"],
        "additionalProperties": False,
        "properties": {
            "doc_id": {"type": "string", "minLength": 1},
            "summary": {"type": "string", "minLength": 1},
            "sentences": {**_STRING_LIST, "minItems": 1},
            "warnings": _STRING_LIST,
        },
    },
    "decompose": {
        "type": "object",
        "required": ["doc_id", "facts"],
        "additionalProperties": False,
        "properties": {
            "doc_id": {"type": "string", "minLength": 1},
            "facts": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["id", "text", "source_sentence"],
                    "additionalProperties": False,
                    "properties": {
                        "id": {"type": "integer", "minimum": 0},
                        "text": {"type": "string", "minLength": 1},
                        "source_sentence": {"type": "integer", "minimum": 0},
                    },
                },
            },
        },
    },
    "table": TABLE_SCHEMA,
    "synth": {
        "type": "object",
        "required": [
            "id",
            "doc_id",
            "text",
            "claim",
            "label",
            "selected_sentence_indices",
            "fact_index",
            "proportion_pct",
            "seed",
        ],
        "additionalProperties": False,
        "properties": {
            "id": {"type": "string", "minLength": 1},
            "doc_id": {"type": "string", "minLength": 1},
            "text": {"type": "string", "minLength": 1},
            "claim": {"type": "string", "minLength": 1},
            "label": _LABEL,
            "selected_sentence_indices": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "minItems": 1,
            },
            "fact_index": {"type": "integer", "minimum": 0},
            "proportion_pct": {"type": "integer", "minimum": 0, "maximum": 100},
            "seed": {"type": "integer"},
        },
    },
    "augment": {
        "type": "object",
        "required": ["text", "claim", "label", "origin"],
        "additionalProperties": False,
        "properties": {
            "text": {"type": "string", "minLength": 1},
            "claim": {"type": "string", "minLength": 1},
            "label": _LABEL,
            "origin": {"type": "string", "enum": ["original", "synthetic"]},
        },
    },
    "scan": {
        "type": "object",
        "required": ["doc_id", "summary", "verdict", "flagged", "table"],
        "additionalProperties": False,
        "properties": {
            "doc_id": {"type": "string", "minLength": 1},
            "summary": {"type": "string", "minLength": 1},
            "verdict": {"type": "string", "enum": ["clean", "abnormal"]},
            "flagged": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["fact_index", "fact"],
                    "additionalProperties": False,
                    "properties": {
                        "fact_index": {"type": "integer", "minimum": 0},
                        "fact": {"type": "string", "minLength": 1},
                    },
                },
            },
            "table": TABLE_SCHEMA,
        },
    },
    "predictions": {
        "type": "object",
        "required": ["id", "predicted"],
        "properties": {
            "id": {"type": "string", "minLength": 1},
            "predicted": _LABEL,
            "p_true": {"type": "number", "minimum": 0, "maximum": 1},
        },
    },
}


def validate_record(record: dict, schema_name: str) -> None:
    jsonschema.validate(record, SCHEMAS[schema_name])


def validate_jsonl_file(path: str | Path, schema_name: str) -> int:
    """Validate every line of a JSONL artifact; returns the line count."""
    n = 0
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            validate_record(json.loads(line), schema_name)
        except jsonschema.ValidationError as exc:
            raise jsonschema.ValidationError(
                f"{path}:{line_no} fails schema {schema_name!r}: {exc.message}"
            ) from exc
        n += 1
    return n
