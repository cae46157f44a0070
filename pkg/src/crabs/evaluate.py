"""Scoring predicted graphs against hand annotations.

Flows and dependencies are treated as predicted links. Per-notebook scores
are precision, recall, F1, accuracy (the Jaccard index tp/(tp+fp+fn), the
true-negative-free accuracy analogue, which satisfies acc = f1/(2-f1)), and
exact match. Graph metrics aggregate as unweighted means over notebooks;
resolution accuracy pools all ambiguities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import AnnotationMismatchError, EmptyReportError, GraphSchemaError
from .graphs import DependencyGraph, FlowGraph, InformationFlow, derive_dependency_graph
from .resolve import AMBIGUITY_INPUT, ResolutionRecord

GroundTruth = FlowGraph


def load_ground_truth(document: bytes | str | Path) -> FlowGraph:
    """Read an annotation file: {notebook_id, n_cells, flows:[{source,target,name,kind}]}."""
    if isinstance(document, Path):
        document = document.read_text(encoding="utf-8")
    elif isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GraphSchemaError(f"malformed annotation JSON: {exc}") from exc
    for field in ("notebook_id", "n_cells", "flows"):
        if field not in data:
            raise GraphSchemaError(f"annotation missing field {field!r}")
    flows = frozenset(
        InformationFlow(f["source"], f["target"], f["name"], f.get("kind", "data")) for f in data["flows"]
    )
    return FlowGraph(notebook_id=data["notebook_id"], n_cells=data["n_cells"], flows=flows)


@dataclass(frozen=True)
class SetScores:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    accuracy: float

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


ZERO_SCORES = SetScores(0, 0, 0, 0.0, 0.0, 0.0, 0.0)


def score_sets(predicted: set, truth: set) -> SetScores:
    """Confusion counts over set-valued predictions.

    Both sets empty is perfect trivial agreement and scores 1.0 across the
    board rather than dividing by zero.
    """
    predicted = set(predicted)
    truth = set(truth)
    tp = len(predicted & truth)
    fp = len(predicted - truth)
    fn = len(truth - predicted)
    if tp == fp == fn == 0:
        return SetScores(0, 0, 0, 1.0, 1.0, 1.0, 1.0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = tp / (tp + fp + fn)
    return SetScores(tp, fp, fn, precision, recall, f1, accuracy)


def _edges(graph) -> frozenset:
    if isinstance(graph, FlowGraph):
        return graph.flows
    if isinstance(graph, DependencyGraph):
        return graph.deps
    raise TypeError(f"cannot score {type(graph).__name__}")


def score_graphs(predicted, truth) -> SetScores:
    """score_sets over graph edges; a wrong cell count scores all zeros."""
    if predicted.n_cells != truth.n_cells:
        return ZERO_SCORES
    return score_sets(set(_edges(predicted)), set(_edges(truth)))


def exact_match(predicted, truth) -> bool:
    """Identical edge sets and identical cell count."""
    return predicted.n_cells == truth.n_cells and _edges(predicted) == _edges(truth)


@dataclass(frozen=True)
class ResolutionScore:
    correct: int
    total: int

    @property
    def accuracy(self) -> float | None:
        """None when no ambiguities existed (not applicable, never 1.0)."""
        if self.total == 0:
            return None
        return self.correct / self.total

    def as_dict(self) -> dict:
        return {"correct": self.correct, "total": self.total, "accuracy": self.accuracy}


def resolution_accuracy(records: list[ResolutionRecord], truth: FlowGraph) -> ResolutionScore:
    """Fraction of verdicts matching what the annotated flows imply.

    A name is a true input of a cell iff some annotated flow targets that cell
    with that name, and a true output iff some annotated flow sources there.
    """
    triples = truth.triples()
    correct = 0
    for record in records:
        ambiguity = record.ambiguity
        if not (1 <= ambiguity.cell_index <= truth.n_cells):
            raise AnnotationMismatchError(
                f"resolution record references cell {ambiguity.cell_index} outside 1..{truth.n_cells}"
            )
        if ambiguity.kind == AMBIGUITY_INPUT:
            expected = any(t == ambiguity.cell_index and n == ambiguity.name for _, t, n in triples)
        else:
            expected = any(s == ambiguity.cell_index and n == ambiguity.name for s, _, n in triples)
        if record.verdict == expected:
            correct += 1
    return ResolutionScore(correct=correct, total=len(records))


@dataclass(frozen=True)
class NotebookScore:
    notebook_id: str
    flow: SetScores
    dep: SetScores
    em_flow: bool
    em_dep: bool
    resolution: ResolutionScore

    def as_dict(self) -> dict:
        return {
            "flow": self.flow.as_dict(),
            "dep": self.dep.as_dict(),
            "em_flow": self.em_flow,
            "em_dep": self.em_dep,
            "resolution": self.resolution.as_dict(),
        }


def score_notebook(
    predicted: FlowGraph,
    truth: FlowGraph,
    records: list[ResolutionRecord] = (),
) -> NotebookScore:
    predicted_deps = derive_dependency_graph(predicted)
    truth_deps = derive_dependency_graph(truth)
    return NotebookScore(
        notebook_id=predicted.notebook_id,
        flow=score_graphs(predicted, truth),
        dep=score_graphs(predicted_deps, truth_deps),
        em_flow=exact_match(predicted, truth),
        em_dep=exact_match(predicted_deps, truth_deps),
        resolution=resolution_accuracy(list(records), truth),
    )


@dataclass(frozen=True)
class MetricsReport:
    per_notebook: dict[str, NotebookScore]
    aggregate_flow: dict[str, float]
    aggregate_dep: dict[str, float]
    em_rate_flow: float
    em_rate_dep: float
    resolution: ResolutionScore
    incomplete: bool = False

    def as_dict(self) -> dict:
        return {
            "schema_version": 1,
            "per_notebook": {nid: score.as_dict() for nid, score in sorted(self.per_notebook.items())},
            "aggregate": {
                "flow": self.aggregate_flow,
                "dep": self.aggregate_dep,
                "em_rate_flow": self.em_rate_flow,
                "em_rate_dep": self.em_rate_dep,
                "resolution": self.resolution.as_dict(),
            },
            "incomplete": self.incomplete,
        }


def _macro(scores: list[SetScores]) -> dict[str, float]:
    n = len(scores)
    return {
        "precision": sum(s.precision for s in scores) / n,
        "recall": sum(s.recall for s in scores) / n,
        "f1": sum(s.f1 for s in scores) / n,
        "accuracy": sum(s.accuracy for s in scores) / n,
    }


def aggregate(per_notebook: list[NotebookScore], incomplete: bool = False) -> MetricsReport:
    """Macro-average the graph metrics, pool the resolution counts."""
    if not per_notebook:
        raise EmptyReportError("no notebook scores to aggregate")
    return MetricsReport(
        per_notebook={score.notebook_id: score for score in per_notebook},
        aggregate_flow=_macro([s.flow for s in per_notebook]),
        aggregate_dep=_macro([s.dep for s in per_notebook]),
        em_rate_flow=sum(1 for s in per_notebook if s.em_flow) / len(per_notebook),
        em_rate_dep=sum(1 for s in per_notebook if s.em_dep) / len(per_notebook),
        resolution=ResolutionScore(
            correct=sum(s.resolution.correct for s in per_notebook),
            total=sum(s.resolution.total for s in per_notebook),
        ),
        incomplete=incomplete,
    )
