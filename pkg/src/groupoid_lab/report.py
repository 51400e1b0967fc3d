"""Findings, reports and their deterministic rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = ["Finding", "Report", "ValidationReport", "emit_report", "format_number"]


@dataclass(frozen=True, order=True)
class Finding:
    code: str
    witness: tuple = ()
    message: str = ""


def _stringify_witness(witness) -> tuple:
    return tuple(str(w) if not isinstance(w, tuple) else "(" + ",".join(map(str, w)) + ")"
                 for w in witness)


@dataclass
class Report:
    """Outcome of a check or command.

    ``status`` is derived: ``error`` if set explicitly, otherwise ``violations``
    when any finding is present and ``ok`` when none are.
    """

    findings: list[Finding] = field(default_factory=list)
    metrics: dict[str, tuple[float, float | None]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    error: str | None = None
    payload: object = None

    def add(self, code: str, witness=(), message: str = "") -> None:
        self.findings.append(Finding(code, _stringify_witness(witness), message))

    def metric(self, name: str, value, tolerance=None) -> None:
        self.metrics[name] = (value, tolerance)

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for f in other.findings:
            self.findings.append(Finding(prefix + f.code, f.witness, f.message))
        for k, v in other.metrics.items():
            self.metrics[prefix + k] = v
        for n in other.notes:
            self.note(n)
        if other.error and not self.error:
            self.error = other.error

    @property
    def status(self) -> str:
        if self.error:
            return "error"
        return "violations" if self.findings else "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def __bool__(self) -> bool:
        return self.ok

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def witnesses(self, code: str) -> list[tuple]:
        return [f.witness for f in self.findings if f.code == code]

    def sorted_findings(self) -> list[Finding]:
        return sorted(self.findings)

    def exit_code(self) -> int:
        return {"ok": 0, "violations": 1, "error": 2}[self.status]


ValidationReport = Report


def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, complex):
        return f"{x.real:.12g}{x.imag:+.12g}i"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _as_json(report: Report) -> dict:
    return {
        "status": report.status,
        "error": report.error,
        "findings": [
            {"code": f.code, "witness": list(f.witness), "message": f.message}
            for f in report.sorted_findings()
        ],
        "metrics": {
            k: {"value": format_number(v), "tolerance": None if t is None else format_number(t)}
            for k, (v, t) in sorted(report.metrics.items())
        },
        "notes": list(report.notes),
    }


def emit_report(report: Report, fmt: str = "text") -> str:
    """Render a report; output is byte-stable for identical reports."""
    if fmt == "json":
        return json.dumps(_as_json(report), sort_keys=True, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    n = len(report.findings)
    head = {"ok": "OK", "violations": "VIOLATIONS", "error": "ERROR"}[report.status]
    lines = [f"{head} ({n} finding{'s' if n != 1 else ''})"]
    if report.error:
        lines.append(f"error: {report.error}")
    for f in report.sorted_findings():
        wit = "(" + ", ".join(f.witness) + ")"
        lines.append(f"  {f.code} {wit}" + (f" {f.message}" if f.message else ""))
    if report.metrics:
        lines.append("metrics:")
        for k, (v, t) in sorted(report.metrics.items()):
            tol = "" if t is None else f" (tol {format_number(t)})"
            lines.append(f"  {k} = {format_number(v)}{tol}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
