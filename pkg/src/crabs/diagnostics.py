"""Structured diagnostics emitted by ingestion, analysis, and graph building."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """One analysis finding: where it happened, a stable code, and a message.

    Codes in use: cell-magic, empty-after-screening, line-screened,
    syntax-error, global-in-function, nonlocal-in-function, name-reuse,
    star-import, unresolved-source, unparseable-response.
    """

    cell_index: int
    code: str
    message: str
    line: int | None = None
    column: int | None = None

    def as_dict(self) -> dict:
        return {
            "cell_index": self.cell_index,
            "code": self.code,
            "message": self.message,
            "line": self.line,
            "column": self.column,
        }

    @staticmethod
    def sort_key(diag: "Diagnostic"):
        return (diag.cell_index, diag.line or 0, diag.column or 0, diag.code, diag.message)
