"""Interchange document validation using JSON Schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

SCHEMAS_DIR = Path(__file__).parent.parent.parent.parent.parent / "schemas"

NETWORK_SCHEMA = "network.schema.json"


@dataclass
class ValidationResult:
    valid: bool
    errors: list[str] = field(default_factory=list)


def _load_schema(schema_name: str) -> dict:
    schema_path = SCHEMAS_DIR / schema_name
    with open(schema_path) as f:
        return json.load(f)


def validate_network_document(data: Any) -> ValidationResult:
    """Validate a parsed network document, collecting every schema violation."""
    validator = jsonschema.Draft202012Validator(_load_schema(NETWORK_SCHEMA))
    errors = [
        f"{error.json_path}: {error.message}"
        for error in sorted(validator.iter_errors(data), key=lambda e: e.json_path)
    ]
    return ValidationResult(valid=not errors, errors=errors)
