"""Stable JSON serialization of analysis results and DOT export.

One graph JSON file carries everything evaluation and export need: per-cell
resolved sets, flows, closed dependencies, diagnostics, and resolution
records. Output is byte-stable: keys are emitted in a fixed order and every
list is sorted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import Diagnostic
from .errors import GraphSchemaError
from .graphs import DependencyGraph, FlowGraph, InformationFlow, derive_dependency_graph
from .pipeline import NotebookResult

SCHEMA_VERSION = 1


def result_to_dict(result: NotebookResult) -> dict:
    cells = []
    resolved_by_index = {r.cell_index: r for r in result.resolved}
    for cell in result.analysis.cells:
        resolved = resolved_by_index[cell.index]
        cells.append(
            {
                "index": cell.index,
                "skipped": cell.skipped,
                "skip_reason": cell.skip_reason,
                "inputs": sorted(resolved.inputs),
                "outputs": [
                    {"name": name, "definitive": definitive}
                    for name, definitive in sorted(resolved.outputs)
                ],
                "code_declarations": sorted(resolved.code_declarations),
                "code_references": sorted(resolved.code_references),
                "deletions": sorted(resolved.deletions),
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "notebook_id": result.flow_graph.notebook_id,
        "n_cells": result.flow_graph.n_cells,
        "cells": cells,
        "flows": [f.as_dict() for f in sorted(result.flow_graph.flows, key=InformationFlow.sort_key)],
        "deps": [[t, s] for t, s in sorted(result.dependency_graph.deps)],
        "diagnostics": [d.as_dict() for d in sorted(result.diagnostics, key=Diagnostic.sort_key)],
        "resolutions": [
            {
                "cell_index": r.ambiguity.cell_index,
                "name": r.ambiguity.name,
                "kind": r.ambiguity.kind,
                "verdict": r.verdict,
                "resolver_id": r.resolver_id,
                "prompt_hash": r.prompt_hash,
            }
            for r in sorted(result.records, key=lambda r: (r.ambiguity.cell_index, r.ambiguity.kind, r.ambiguity.name))
        ],
    }


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def write_result(result: NotebookResult, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dump_json(result_to_dict(result)), encoding="utf-8")
    return path


@dataclass(frozen=True)
class LoadedGraph:
    """A graph JSON file read back for evaluation or export."""

    notebook_id: str
    n_cells: int
    flow_graph: FlowGraph
    dependency_graph: DependencyGraph
    raw: dict


def load_graph_json(document: bytes | str | Path) -> LoadedGraph:
    if isinstance(document, Path):
        document = document.read_text(encoding="utf-8")
    elif isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GraphSchemaError(f"malformed graph JSON: {exc}") from exc
    for required in ("notebook_id", "n_cells", "flows"):
        if required not in data:
            raise GraphSchemaError(f"graph JSON missing field {required!r}")
    try:
        flows = frozenset(
            InformationFlow(f["source"], f["target"], f["name"], f.get("kind", "data")) for f in data["flows"]
        )
    except (KeyError, TypeError) as exc:
        raise GraphSchemaError(f"graph JSON has malformed flow entries: {exc}") from exc
    flow_graph = FlowGraph(notebook_id=data["notebook_id"], n_cells=data["n_cells"], flows=flows)
    if "deps" in data:
        deps = frozenset((t, s) for t, s in data["deps"])
        direct = derive_dependency_graph(flow_graph).direct
        dependency_graph = DependencyGraph(data["notebook_id"], data["n_cells"], deps, direct)
    else:
        dependency_graph = derive_dependency_graph(flow_graph)
    return LoadedGraph(data["notebook_id"], data["n_cells"], flow_graph, dependency_graph, data)


VIEW_FLOWS = "flows"
VIEW_DEPS = "deps"


def to_dot(loaded: LoadedGraph, view: str = VIEW_FLOWS) -> str:
    """Render flows (edges labeled by name, code dashed) or dependencies
    (direct solid, closure-only dotted). Node and edge order is fixed."""
    lines = ["digraph notebook {", "  rankdir=LR;"]
    for index in range(1, loaded.n_cells + 1):
        lines.append(f'  c{index} [label="cell {index}"];')
    if view == VIEW_FLOWS:
        for flow in sorted(loaded.flow_graph.flows, key=InformationFlow.sort_key):
            style = ', style=dashed' if flow.kind == "code" else ""
            lines.append(f'  c{flow.source} -> c{flow.target} [label="{flow.name}"{style}];')
    elif view == VIEW_DEPS:
        direct = loaded.dependency_graph.direct
        for t, s in sorted(loaded.dependency_graph.deps):
            style = "" if (t, s) in direct else " [style=dotted]"
            lines.append(f"  c{t} -> c{s}{style};")
    else:
        raise ValueError(f"unknown view {view!r}")
    lines.append("}")
    return "\n".join(lines) + "\n"
