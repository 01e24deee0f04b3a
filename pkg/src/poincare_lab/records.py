"""Serialization helpers shared by the command-line driver.

Floats are written with ``repr`` (shortest round-trip form, which is
what :mod:`json` does); exact rationals go out as ``"num/den"`` strings.
"""

from __future__ import annotations

import datetime as _dt
import json
from fractions import Fraction
from pathlib import Path

from . import __version__

SCHEMA_VERSION = "1.0"
TOOL = f"poincare-lab {__version__}"


class SchemaError(ValueError):
    pass


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def dumps_line(obj) -> str:
    """Compact, key-order-preserving JSON; rejects NaN / infinity."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def dumps_pretty(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def check_schema(d: dict) -> dict:
    version = d.get("schema_version")
    if version is None:
        raise SchemaError("payload has no schema_version")
    if str(version).split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise SchemaError(f"unsupported schema_version {version!r} (reader is {SCHEMA_VERSION})")
    return d


def run_record(command: str, params: dict, payloads: list) -> dict:
    """Envelope for one CLI invocation; only ``timestamp`` varies between reruns."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL,
        "command": command,
        "params": params,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "payloads": payloads,
    }


def strip_volatile(record: dict) -> dict:
    """Copy of a run record without the fields excluded from reproducibility checks."""
    return {k: v for k, v in record.items() if k != "timestamp"}


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def read_jsonl(path) -> list[dict]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out
