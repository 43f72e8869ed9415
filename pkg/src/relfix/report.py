"""Deterministic JSON report emission.

Reports are plain dicts; this module owns the canonical serialization:
underscore-prefixed keys (raw objects kept for callers) are stripped,
fractions become strings, tuples become lists, and the result is dumped
with sorted keys and a trailing newline so that identical inputs yield
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .version import __version__

__all__ = ["to_jsonable", "canonical_json", "spec_sha256", "make_report", "write_report"]


def to_jsonable(obj):
    """Recursively reduce a report value to JSON-ready data.

    Unknown object types raise TypeError: a leaked raw object is a bug in
    report assembly, not something to serialize by repr.
    """
    if isinstance(obj, dict):
        return {
            str(k): to_jsonable(v)
            for k, v in obj.items()
            if not str(k).startswith("_")
        }
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"non-serializable report value of type {type(obj).__name__}")


def canonical_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"


def spec_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_report(command: str, spec_source: str | None, seed: int | None, result: dict) -> dict:
    return {
        "tool_version": __version__,
        "command": command,
        "spec_sha256": spec_sha256(spec_source) if spec_source is not None else None,
        "seed": seed,
        "result": result,
    }


def write_report(report: dict, path: str | None) -> str:
    """Serialize; write to path when given.  Returns the text either way."""
    text = canonical_json(report)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
