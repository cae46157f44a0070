"""Information flow graphs and the derived cell execution dependency graph.

Flows connect an output of an earlier cell to an input of a later cell. For
each input, candidate sources are scanned backwards from the target: every
earlier cell offering the name contributes a flow, and the scan stops at the
first definitive definition, which supersedes anything older. Conditional or
in-place definitions are not definitive, so a possibly-skipped redefinition
leaves the older source visible as well. Cell-level dependencies are the
transitive closure of "at least one flow exists between the two cells".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagnostics import Diagnostic
from .errors import IncompleteResolutionError
from .estimates import EstimatePair, compute_ambiguities
from .resolve import AMBIGUITY_INPUT, ResolutionRecord

FLOW_DATA = "data"
FLOW_CODE = "code"


@dataclass(frozen=True)
class InformationFlow:
    source: int
    target: int
    name: str
    kind: str = FLOW_DATA

    def as_dict(self) -> dict:
        return {"source": self.source, "target": self.target, "name": self.name, "kind": self.kind}

    @staticmethod
    def sort_key(flow: "InformationFlow"):
        return (flow.source, flow.target, flow.kind, flow.name)


@dataclass(frozen=True)
class FlowGraph:
    notebook_id: str
    n_cells: int
    flows: frozenset[InformationFlow] = frozenset()

    def triples(self) -> frozenset[tuple[int, int, str]]:
        return frozenset((f.source, f.target, f.name) for f in self.flows)


@dataclass(frozen=True)
class DependencyGraph:
    """Transitively closed (later, earlier) cell pairs."""

    notebook_id: str
    n_cells: int
    deps: frozenset[tuple[int, int]] = frozenset()
    direct: frozenset[tuple[int, int]] = frozenset()


@dataclass(frozen=True)
class ResolvedIOSet:
    cell_index: int
    inputs: frozenset[str] = frozenset()
    outputs: frozenset[tuple[str, bool]] = frozenset()
    code_declarations: frozenset[str] = frozenset()
    code_references: frozenset[str] = frozenset()
    deletions: frozenset[str] = frozenset()

    @property
    def output_names(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.outputs)

    def is_definitive(self, name: str) -> bool:
        return (name, True) in self.outputs


def apply_verdicts(pair: EstimatePair, records: Iterable[ResolutionRecord]) -> ResolvedIOSet:
    """Move the resolved set between the bounds according to the verdicts.

    Inputs/outputs start from the lower estimate; a yes verdict admits the
    ambiguous name with the upper estimate's definitive flag. Names absent
    from the upper estimate can never be admitted, whatever the resolver says.
    """
    by_key = {}
    for record in records:
        by_key[record.ambiguity.key()] = record

    inputs = set(pair.lower.inputs)
    outputs = {name: pair.upper.is_definitive(name) for name in pair.lower.candidate_names}

    for ambiguity in compute_ambiguities(pair):
        record = by_key.get(ambiguity.key())
        if record is None:
            raise IncompleteResolutionError(
                f"no resolution record for cell {ambiguity.cell_index} {ambiguity.kind} {ambiguity.name!r}"
            )
        if not record.verdict:
            continue
        if ambiguity.kind == AMBIGUITY_INPUT:
            inputs.add(ambiguity.name)
        else:
            outputs.setdefault(ambiguity.name, pair.upper.is_definitive(ambiguity.name))

    return ResolvedIOSet(
        cell_index=pair.cell_index,
        inputs=frozenset(inputs),
        outputs=frozenset(outputs.items()),
        code_declarations=pair.lower.code_declarations,
        code_references=pair.lower.code_references,
        deletions=pair.lower.deletions,
    )


def resolved_from_estimate(pair: EstimatePair, which: str) -> ResolvedIOSet:
    """The lower or upper estimate reinterpreted as a resolved set."""
    estimate = pair.lower if which == "lower" else pair.upper
    return ResolvedIOSet(
        cell_index=pair.cell_index,
        inputs=estimate.inputs,
        outputs=estimate.output_candidates,
        code_declarations=estimate.code_declarations,
        code_references=estimate.code_references,
        deletions=estimate.deletions,
    )


def build_flow_graph(
    resolved: Sequence[ResolvedIOSet],
    notebook_id: str = "",
    n_cells: int | None = None,
    diagnostics: list[Diagnostic] | None = None,
) -> FlowGraph:
    """Match outputs to later inputs with the definitive-kill backward scan."""
    by_index = {r.cell_index: r for r in resolved}
    total = n_cells if n_cells is not None else (max(by_index) if by_index else 0)
    flows: set[InformationFlow] = set()

    for target_set in resolved:
        t = target_set.cell_index
        for name in sorted(target_set.inputs):
            found = False
            for s in range(t - 1, 0, -1):
                source_set = by_index.get(s)
                if source_set is None:
                    continue
                if name in source_set.output_names:
                    flows.add(InformationFlow(s, t, name, FLOW_DATA))
                    found = True
                    if source_set.is_definitive(name):
                        break
                if name in source_set.deletions:
                    break
            if not found and diagnostics is not None:
                diagnostics.append(
                    Diagnostic(t, "unresolved-source", f"input {name!r} has no earlier producing cell; flow omitted")
                )
        for name in sorted(target_set.code_references):
            declared = [s for s in range(t - 1, 0, -1) if s in by_index and name in by_index[s].code_declarations]
            if declared:
                flows.add(InformationFlow(declared[0], t, name, FLOW_CODE))
            elif diagnostics is not None:
                diagnostics.append(
                    Diagnostic(t, "unresolved-source", f"code reference {name!r} has no earlier declaring cell")
                )

    return FlowGraph(notebook_id=notebook_id, n_cells=total, flows=frozenset(flows))


def derive_dependency_graph(graph: FlowGraph) -> DependencyGraph:
    """Direct edges from flows, then reachability closure over the DAG."""
    direct: dict[int, set[int]] = {}
    for flow in graph.flows:
        direct.setdefault(flow.target, set()).add(flow.source)

    reach: dict[int, set[int]] = {}
    for t in sorted(direct):  # edges point to strictly smaller indices
        closed: set[int] = set()
        for s in direct[t]:
            closed.add(s)
            closed |= reach.get(s, set())
        reach[t] = closed

    deps = frozenset((t, s) for t, sources in reach.items() for s in sources)
    direct_edges = frozenset((t, s) for t, sources in direct.items() for s in sources)
    return DependencyGraph(notebook_id=graph.notebook_id, n_cells=graph.n_cells, deps=deps, direct=direct_edges)
