"""End-to-end notebook analysis: screen, parse, estimate, resolve, build.

Cells of one notebook are processed strictly in order because the alias store
and name registries are sequential; different notebooks are independent and
can be analyzed in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .aliases import AliasStore, update_alias_store
from .diagnostics import Diagnostic
from .estimates import EstimatePair, compute_ambiguities, estimate_pair
from .events import AnalysisContext, CellEventReport, analyze_cell_tree, parse_cell
from .graphs import (
    DependencyGraph,
    FlowGraph,
    ResolvedIOSet,
    apply_verdicts,
    build_flow_graph,
    derive_dependency_graph,
)
from .ingest import SKIP_SYNTAX_ERROR, CellSequence, CodeCell, load_notebook, screen_cell
from .resolve import Ambiguity, ResolutionRecord, ResolverConfig, resolve_all

MODE_LOWER = "lower"
MODE_UPPER = "upper"
MODE_RESOLVED = "resolved"


@dataclass
class CellAnalysis:
    cell: CodeCell
    report: CellEventReport | None
    pair: EstimatePair


@dataclass
class NotebookAnalysis:
    cells: CellSequence
    analyses: list[CellAnalysis]
    alias_store: AliasStore
    ambiguities: list[Ambiguity]
    diagnostics: list[Diagnostic]

    @property
    def pairs(self) -> list[EstimatePair]:
        return [a.pair for a in self.analyses]


@dataclass
class NotebookResult:
    analysis: NotebookAnalysis
    records: list[ResolutionRecord]
    resolved: list[ResolvedIOSet]
    flow_graph: FlowGraph
    dependency_graph: DependencyGraph
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def notebook_id(self) -> str:
        return self.flow_graph.notebook_id


def analyze_cells(cells: CellSequence, track_imports: bool = False) -> NotebookAnalysis:
    """The syntactic phase: per-cell lower/upper estimates plus ambiguities."""
    context = AnalysisContext(track_imports=track_imports)
    store = AliasStore()
    analyses: list[CellAnalysis] = []
    ambiguities: list[Ambiguity] = []
    diagnostics: list[Diagnostic] = []
    screened: list[CodeCell] = []

    for cell in cells:
        cell = screen_cell(cell)
        diagnostics.extend(cell.diagnostics)
        if cell.skipped:
            screened.append(cell)
            analyses.append(CellAnalysis(cell, None, EstimatePair.empty(cell.index)))
            continue

        try:
            tree = parse_cell(cell)
        except SyntaxError as exc:
            line = cell.original_line(exc.lineno or 1)
            diagnostics.append(
                Diagnostic(cell.index, SKIP_SYNTAX_ERROR, f"cell skipped: {exc.msg}", line=line, column=exc.offset)
            )
            cell = replace(cell, skipped=True, skip_reason=SKIP_SYNTAX_ERROR)
            screened.append(cell)
            analyses.append(CellAnalysis(cell, None, EstimatePair.empty(cell.index)))
            continue

        report = analyze_cell_tree(tree, context, cell.index)
        for diag in report.diagnostics:
            mapped = replace(diag, line=cell.original_line(diag.line) if diag.line else diag.line)
            diagnostics.append(mapped)

        update_alias_store(tree, store, cell.index)
        pair = estimate_pair(report, store)
        ambiguities.extend(compute_ambiguities(pair, events=report, aliases=store))
        context.update_from(report)

        screened.append(cell)
        analyses.append(CellAnalysis(cell, report, pair))

    sequence = replace(cells, cells=tuple(screened))
    return NotebookAnalysis(sequence, analyses, store, ambiguities, diagnostics)


def resolve_ambiguities(
    analysis: NotebookAnalysis, config: ResolverConfig, ground_truth=None
) -> list[ResolutionRecord]:
    return resolve_all(analysis.ambiguities, analysis.cells, config, ground_truth=ground_truth)


def build_result(analysis: NotebookAnalysis, records: list[ResolutionRecord]) -> NotebookResult:
    by_cell: dict[int, list[ResolutionRecord]] = {}
    for record in records:
        by_cell.setdefault(record.ambiguity.cell_index, []).append(record)

    resolved = [apply_verdicts(pair, by_cell.get(pair.cell_index, [])) for pair in analysis.pairs]
    diagnostics = list(analysis.diagnostics)
    flow_graph = build_flow_graph(
        resolved,
        notebook_id=analysis.cells.notebook_id,
        n_cells=len(analysis.cells),
        diagnostics=diagnostics,
    )
    dependency_graph = derive_dependency_graph(flow_graph)
    return NotebookResult(analysis, records, resolved, flow_graph, dependency_graph, diagnostics)


def analyze_notebook(
    document: bytes | str,
    notebook_id: str = "",
    mode: str = MODE_RESOLVED,
    config: ResolverConfig | None = None,
    track_imports: bool = False,
    ground_truth=None,
) -> NotebookResult:
    """Full pipeline over one notebook document.

    ``mode=lower``/``upper`` short-circuit the resolver with assume-no /
    assume-yes; ``mode=resolved`` uses the supplied resolver configuration.
    """
    cells = load_notebook(document, notebook_id=notebook_id)
    analysis = analyze_cells(cells, track_imports=track_imports)
    if mode == MODE_LOWER:
        config = replace(config or ResolverConfig(), resolver="assume-no")
    elif mode == MODE_UPPER:
        config = replace(config or ResolverConfig(), resolver="assume-yes")
    elif config is None:
        config = ResolverConfig()
    records = resolve_ambiguities(analysis, config, ground_truth=ground_truth)
    return build_result(analysis, records)
