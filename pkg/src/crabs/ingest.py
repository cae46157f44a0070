"""Notebook loading and mixed-code screening.

Reads the standard notebook JSON container (nbformat v4: top-level ``cells``
array, each cell carrying ``cell_type`` and ``source``), keeps the code cells
in document order, and screens out lines that are not Python: shell escapes
(``!``) and line magics (``%``) are dropped line by line, while a cell magic
(``%%``) on the first line disqualifies the whole cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .diagnostics import Diagnostic
from .errors import EmptyNotebookError, NotebookParseError, NotebookSchemaError

SKIP_CELL_MAGIC = "cell-magic"
SKIP_EMPTY = "empty-after-screening"
SKIP_SYNTAX_ERROR = "syntax-error"


@dataclass(frozen=True)
class CodeCell:
    """One code cell, 1-indexed among the notebook's code cells."""

    index: int
    source: tuple[str, ...]
    screened_source: tuple[str, ...] = ()
    line_map: tuple[int, ...] = ()  # screened line i -> 1-based line in source
    skipped: bool = False
    skip_reason: str | None = None
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def screened_text(self) -> str:
        return "\n".join(self.screened_source)

    def original_line(self, screened_lineno: int) -> int:
        """Map a 1-based line number in screened text back to the cell source."""
        if 1 <= screened_lineno <= len(self.line_map):
            return self.line_map[screened_lineno - 1]
        return screened_lineno


@dataclass(frozen=True)
class CellSequence:
    """Ordered code cells of one notebook."""

    notebook_id: str
    cells: tuple[CodeCell, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def cell(self, index: int) -> CodeCell:
        return self.cells[index - 1]


def _source_lines(source) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    if isinstance(source, list):
        return "".join(source).splitlines()
    raise NotebookSchemaError("source", f"cell source must be string or list, got {type(source).__name__}")


def load_notebook(document: bytes | str, notebook_id: str = "") -> CellSequence:
    """Extract the code cells of a notebook JSON document, indexed from 1.

    Markdown and raw cells are dropped. Raises NotebookParseError (with the
    byte offset) on malformed JSON, NotebookSchemaError naming the missing
    field, and EmptyNotebookError when no code cells are present.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise NotebookParseError(f"malformed notebook JSON at byte {exc.pos}: {exc.msg}", exc.pos) from exc

    if not isinstance(data, dict) or "cells" not in data:
        raise NotebookSchemaError("cells")
    raw_cells = data["cells"]
    if not isinstance(raw_cells, list):
        raise NotebookSchemaError("cells", "notebook field 'cells' must be a list")

    cells: list[CodeCell] = []
    for pos, raw in enumerate(raw_cells):
        if not isinstance(raw, dict) or "cell_type" not in raw:
            raise NotebookSchemaError("cell_type", f"cell {pos} has no 'cell_type' field")
        if raw["cell_type"] != "code":
            continue
        if "source" not in raw:
            raise NotebookSchemaError("source", f"code cell {pos} has no 'source' field")
        lines = _source_lines(raw["source"])
        cells.append(CodeCell(index=len(cells) + 1, source=tuple(lines)))

    if not cells:
        raise EmptyNotebookError(f"notebook {notebook_id!r} contains no code cells")
    return CellSequence(notebook_id=notebook_id, cells=tuple(cells))


def screen_cell(cell: CodeCell) -> CodeCell:
    """Remove non-Python lines from a cell; recomputed from the raw source.

    A leading ``%%`` marks the whole cell as skipped (cell-magic); individual
    ``%``/``!`` lines are removed with a diagnostic. A cell with nothing left
    is skipped as empty-after-screening. Idempotent because it always starts
    over from ``cell.source``.
    """
    diagnostics: list[Diagnostic] = []
    source = cell.source

    if source and source[0].lstrip().startswith("%%"):
        diagnostics.append(
            Diagnostic(cell.index, SKIP_CELL_MAGIC, f"cell magic {source[0].strip().split()[0]!r} skips the whole cell", line=1)
        )
        return replace(
            cell,
            screened_source=(),
            line_map=(),
            skipped=True,
            skip_reason=SKIP_CELL_MAGIC,
            diagnostics=tuple(diagnostics),
        )

    kept: list[str] = []
    line_map: list[int] = []
    for lineno, line in enumerate(source, start=1):
        head = line.lstrip()
        if head.startswith("%") or head.startswith("!"):
            diagnostics.append(Diagnostic(cell.index, "line-screened", f"non-Python line removed: {line.strip()!r}", line=lineno))
            continue
        kept.append(line)
        line_map.append(lineno)

    if not any(line.strip() for line in kept):
        diagnostics.append(Diagnostic(cell.index, SKIP_EMPTY, "no Python code remains after screening"))
        return replace(
            cell,
            screened_source=tuple(kept),
            line_map=tuple(line_map),
            skipped=True,
            skip_reason=SKIP_EMPTY,
            diagnostics=tuple(diagnostics),
        )

    return replace(
        cell,
        screened_source=tuple(kept),
        line_map=tuple(line_map),
        skipped=False,
        skip_reason=None,
        diagnostics=tuple(diagnostics),
    )


def screen_cells(cells: CellSequence) -> CellSequence:
    return replace(cells, cells=tuple(screen_cell(c) for c in cells))


def load_notebook_file(path) -> CellSequence:
    from pathlib import Path

    p = Path(path)
    return load_notebook(p.read_bytes(), notebook_id=p.stem)
