"""Static dataflow analysis for Python notebooks.

The pipeline brackets each cell's inter-cell inputs and outputs between a
lower estimate (certain from the cell's syntax alone) and an upper estimate
(certain plus possible), resolves the remaining ambiguities with a pluggable
yes/no resolver, and emits the notebook's information flow graph, the
transitively closed cell execution dependency graph, and evaluation metrics
against hand annotations.
"""

from .aliases import AliasStore, update_alias_store
from .diagnostics import Diagnostic
from .errors import (
    AnnotationMismatchError,
    CacheMissError,
    CrabsError,
    EmptyNotebookError,
    EmptyReportError,
    GraphSchemaError,
    IncompleteResolutionError,
    NotebookParseError,
    NotebookSchemaError,
    ResolverError,
    UnparseableResponseError,
)
from .estimates import (
    CellIOEstimate,
    EstimatePair,
    compute_ambiguities,
    estimate_pair,
    lower_estimate,
    upper_estimate,
)
from .evaluate import (
    GroundTruth,
    MetricsReport,
    NotebookScore,
    ResolutionScore,
    SetScores,
    aggregate,
    exact_match,
    load_ground_truth,
    resolution_accuracy,
    score_graphs,
    score_notebook,
    score_sets,
)
from .events import (
    AnalysisContext,
    CellEventReport,
    NameEvent,
    analyze_cell_tree,
    collect_name_events,
    parse_cell,
)
from .graphs import (
    DependencyGraph,
    FlowGraph,
    InformationFlow,
    ResolvedIOSet,
    apply_verdicts,
    build_flow_graph,
    derive_dependency_graph,
    resolved_from_estimate,
)
from .ingest import CellSequence, CodeCell, load_notebook, load_notebook_file, screen_cell
from .pipeline import (
    NotebookAnalysis,
    NotebookResult,
    analyze_cells,
    analyze_notebook,
    build_result,
    resolve_ambiguities,
)
from .resolve import (
    AMBIGUITY_INPUT,
    AMBIGUITY_OUTPUT,
    Ambiguity,
    ResolutionRecord,
    ResolverConfig,
    build_prompt,
    parse_verdict,
    prompt_digest,
    resolve_all,
)
from .serialize import LoadedGraph, load_graph_json, result_to_dict, to_dot, write_result

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
