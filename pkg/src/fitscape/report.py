"""Report documents: canonical JSON with hashes, seeds, budgets, warnings.

Reports are deterministic byte-for-byte for identical inputs and flags:
keys are sorted, floats use repr round-tripping via json, and nothing
time- or host-dependent is recorded. Every stochastic section carries its
seed and budget; subsampling or approximation surfaces as a structured
warning, never only as prose.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .errors import ValidationError

SCHEMA_RESOURCE = "report.schema.json"


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _plain(value):
    """Recursively convert numpy scalars/arrays so json can serialize."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


class ReportBuilder:
    def __init__(self, command: str, seed: int | None):
        self.document = {
            "toolVersion": __version__,
            "command": command,
            "inputs": {},
            "seeds": {},
            "budgets": {},
            "sections": {},
            "warnings": [],
        }
        if seed is not None:
            self.document["seeds"]["global"] = int(seed)

    def add_input(self, label: str, path) -> None:
        self.document["inputs"][label] = {
            "path": str(path),
            "sha256": file_sha256(path),
        }

    def add_seed(self, name: str, seed: int) -> None:
        self.document["seeds"][name] = int(seed)

    def add_budget(self, name: str, value, source: str) -> None:
        self.document["budgets"][name] = {"value": _plain(value), "source": source}

    def add_section(self, name: str, content: dict) -> None:
        self.document["sections"][name] = _plain(content)

    def add_warning(self, code: str, message: str, context: dict | None = None) -> None:
        entry = {"code": code, "message": message}
        if context:
            entry["context"] = _plain(context)
        self.document["warnings"].append(entry)

    def finish(self) -> dict:
        validate_report(self.document)
        return self.document


def load_schema() -> dict:
    text = resources.files("fitscape.schema").joinpath(SCHEMA_RESOURCE).read_text("utf-8")
    return json.loads(text)


def validate_report(document: dict) -> None:
    try:
        jsonschema.validate(document, load_schema())
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"report does not match its schema: {exc.message}") from None


def render(document: dict) -> str:
    """Canonical serialization: sorted keys, stable float repr, newline end."""
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(document: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render(document))
