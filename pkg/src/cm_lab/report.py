"""Machine-readable report documents (JSON and CSV).

Numbers are serialized as decimal strings at their full tagged precision,
never as binary floats, so reports are precision-faithful and round-trip
losslessly.  JSON uses sorted keys and a fixed layout; CSV follows RFC 4180
(CRLF line endings, header row, minimal quoting) and carries exactly the
same rows and values as the JSON encoding.

Reports are deterministic by default: the ``timestamp`` field stays null
unless explicitly provided, so repeated runs on equal inputs are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from ._version import __version__
from .checker import CMReport
from .kernel import EvalConfig

__all__ = ["ReportDocument", "check_report_document", "table_report_document"]

FORMATS = ("json", "csv")


@dataclass
class ReportDocument:
    """Serializable container: metadata, tabular rows, and a summary.

    All cell and summary values are JSON-native (strings, ints, bools,
    None, and nested dicts/lists thereof); numeric quantities arrive here
    already rendered as decimal strings.
    """

    kind: str
    meta: dict[str, Any]
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "meta": self.meta,
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        payload = json.loads(text)
        return cls(
            kind=payload["kind"],
            meta=payload["meta"],
            columns=payload["columns"],
            rows=payload["rows"],
            summary=payload["summary"],
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\r\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _cell(row.get(k)) for k in self.columns})
        return buf.getvalue()

    @classmethod
    def rows_from_csv(cls, text: str) -> list[dict[str, str]]:
        return list(csv.DictReader(io.StringIO(text)))

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")

    def write(self, path, fmt: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(self.render(fmt))


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _meta(cfg: EvalConfig, invocation: dict[str, Any], timestamp: str | None) -> dict[str, Any]:
    return {
        "tool": "cm-lab",
        "version": __version__,
        "timestamp": timestamp,
        "precision_digits": cfg.precision_digits,
        "sign_tolerance": cfg.sign_tolerance.decimal(),
        "invocation": invocation,
    }


def check_report_document(
    report: CMReport,
    cfg: EvalConfig,
    invocation: dict[str, Any],
    timestamp: str | None = None,
) -> ReportDocument:
    """Flatten a CMReport: one row per (grid point, order) signed value."""
    rows = [
        {"t": s.t.decimal(), "order": s.order, "value": s.value.decimal()}
        for s in report.samples
    ]
    fn = report.function
    describe = getattr(fn, "describe", None)
    summary = {
        "function": describe() if describe else f"expression({fn.kind})",
        "mode": report.mode,
        "grid": {
            "lo": report.grid.lo.decimal(),
            "hi": report.grid.hi.decimal(),
            "count": report.grid.count,
            "spacing": report.grid.spacing,
        },
        "max_order": report.max_order,
        "min_margin": report.min_margin.decimal(),
        "strict": report.strict,
        "partial": report.partial,
        "violations": [
            {"t": v.t.decimal(), "order": v.order, "value": v.value.decimal()}
            for v in report.violations
        ],
        "failed_points": [
            {"t": t.decimal(), "error": msg} for t, msg in report.failed_points
        ],
    }
    return ReportDocument(
        kind="check",
        meta=_meta(cfg, invocation, timestamp),
        columns=["t", "order", "value"],
        rows=rows,
        summary=summary,
    )


def table_report_document(
    kind: str,
    columns: list[str],
    rows: list[dict[str, Any]],
    summary: dict[str, Any],
    cfg: EvalConfig,
    invocation: dict[str, Any],
    timestamp: str | None = None,
) -> ReportDocument:
    """Generic tabular report (sweep rows, laplace cross-check rows)."""
    return ReportDocument(
        kind=kind,
        meta=_meta(cfg, invocation, timestamp),
        columns=columns,
        rows=rows,
        summary=summary,
    )
