"""Run records, JSON/CSV export and the flat ``key = value`` config format."""
from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .chern_simons import CSResult
from .presets import PresetSpec
from .suites import SuiteResult

__all__ = [
    "CSV_HEADER",
    "RUN_RECORD_SCHEMA",
    "RunRecord",
    "export_results",
    "render",
    "parse_csv",
    "parse_json",
    "parse_config",
]

CSV_HEADER = ("epsilon", "cs_direct", "cs_reduced", "term_linear", "term_quadratic", "error_estimate")

_NUM = {"type": "number"}
RUN_RECORD_SCHEMA = {
    "type": "object",
    "required": ["preset", "fiber_volume", "results", "fit", "suites"],
    "properties": {
        "preset": {"type": "object", "required": ["name"]},
        "fiber_volume": _NUM,
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(CSV_HEADER),
                "properties": {k: _NUM for k in CSV_HEADER},
            },
        },
        "fit": {
            "oneOf": [
                {"type": "null"},
                {"type": "object", "required": ["a", "b", "residual"], "properties": {k: _NUM for k in "ab"}},
            ]
        },
        "suites": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["suite", "passed", "checks"],
                "properties": {"passed": {"type": "boolean"}, "checks": {"type": "array"}},
            },
        },
        "version": {"type": "string"},
        "timestamp": {"type": "string"},
    },
}


@dataclass
class RunRecord:
    preset: PresetSpec
    fiber_volume: float
    results: list[CSResult] = field(default_factory=list)
    fit: Optional[dict] = None
    suites: list[SuiteResult] = field(default_factory=list)
    version: str = ""
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self) -> dict:
        return {
            "preset": asdict(self.preset),
            "fiber_volume": self.fiber_volume,
            "results": [_result_row(r) for r in self.results],
            "fit": self.fit,
            "suites": [
                {
                    "suite": s.suite,
                    "preset": s.preset,
                    "passed": s.passed,
                    "seconds": s.seconds,
                    "checks": [asdict(c) for c in s.checks],
                }
                for s in self.suites
            ],
            "version": self.version,
            "timestamp": self.timestamp,
        }


def _result_row(r: CSResult) -> dict:
    return {
        "epsilon": r.epsilon,
        "cs_direct": r.cs_direct,
        "cs_reduced": r.cs_reduced,
        "term_linear": r.term_linear,
        "term_quadratic": r.term_quadratic,
        "error_estimate": r.quadrature_error_estimate,
        "stokes_term": r.stokes_term,
        "direct_error": r.direct_error,
        "reduced_error": r.reduced_error,
    }


def render(record: RunRecord, fmt: str) -> str:
    """Serialize a record. Floats are written with ``repr`` so they parse
    back bit-for-bit."""
    if fmt == "json":
        return json.dumps(record.to_dict(), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in record.to_dict()["results"]:
            w.writerow([repr(float(row[k])) for k in CSV_HEADER])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}; expected json or csv")


def export_results(record: RunRecord, fmt: str, path) -> None:
    """Write ``record`` to ``path`` (``"-"`` for stdout)."""
    text = render(record, fmt)
    if str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def parse_json(text: str) -> dict:
    return json.loads(text)


def parse_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [{k: float(v) for k, v in zip(header, row)} for row in reader]


def parse_config(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Keys are returned
    with dashes turned into underscores; values stay strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        out[key.lstrip("-").replace("-", "_")] = value
    return out
