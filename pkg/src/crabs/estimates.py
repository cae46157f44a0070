"""Lower and upper estimates of a cell's inter-cell I/O set.

Both estimates are assembled from the same event stream. The lower estimate
keeps only what is certain from the cell's own syntax; the upper estimate adds
everything that is merely possible: names passed to calls and method-call
bases may be modified by the call, loop variables survive the loop, reordered
branch executions inside loops can source a name externally, and in-place
changes propagate along shared references. By construction the lower estimate
is a subset of the upper, and the truth lies between them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aliases import AliasStore
from .events import (
    CODE,
    DEFINE,
    GRADE_AMBIGUOUS,
    GRADE_CERTAIN,
    GRADE_MASKED,
    MAYBE_DEFINE,
    USE,
    CellEventReport,
    DeletionMarker,
    NameEvent,
)
from .resolve import AMBIGUITY_INPUT, AMBIGUITY_OUTPUT, Ambiguity

_CANDIDATE_USE_ROLES = ("call-arg", "call-base")


@dataclass(frozen=True)
class CellIOEstimate:
    """Per-cell inputs, output candidates, and code declarations/references.

    ``output_candidates`` pairs each name with a ``definitive`` flag: an
    unconditional top-level rebinding supersedes earlier definitions of the
    name; conditional definitions and in-place updates do not.
    """

    inputs: frozenset[str] = frozenset()
    output_candidates: frozenset[tuple[str, bool]] = frozenset()
    code_declarations: frozenset[str] = frozenset()
    code_references: frozenset[str] = frozenset()
    deletions: frozenset[str] = frozenset()

    @property
    def candidate_names(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.output_candidates)

    def is_definitive(self, name: str) -> bool:
        return (name, True) in self.output_candidates

    def is_empty(self) -> bool:
        return not (self.inputs or self.output_candidates or self.code_declarations or self.code_references)


EMPTY_ESTIMATE = CellIOEstimate()


@dataclass(frozen=True)
class EstimatePair:
    lower: CellIOEstimate
    upper: CellIOEstimate
    cell_index: int

    @staticmethod
    def empty(cell_index: int) -> "EstimatePair":
        return EstimatePair(EMPTY_ESTIMATE, EMPTY_ESTIMATE, cell_index)


def _events_and_deletions(events) -> tuple[list[NameEvent], list[DeletionMarker]]:
    if isinstance(events, CellEventReport):
        return list(events.events), list(events.deletions)
    return list(events), []


def _assemble(
    events: list[NameEvent],
    deletions: list[DeletionMarker],
    upper: bool,
    aliases: AliasStore | None,
    cell_index: int | None,
) -> CellIOEstimate:
    inputs: set[str] = set()
    candidates: dict[str, bool] = {}
    declarations: set[str] = set()
    references: set[str] = set()
    deleted: set[str] = set()

    markers = sorted(deletions, key=lambda m: m.seq)
    marker_pos = 0

    for seq, event in enumerate(events):
        while marker_pos < len(markers) and markers[marker_pos].seq <= seq:
            marker = markers[marker_pos]
            if marker.top_level_unconditional:
                candidates.pop(marker.name, None)
                deleted.add(marker.name)
            marker_pos += 1

        if event.kind == CODE:
            if event.action == DEFINE:
                declarations.add(event.name)
            elif event.action == USE and event.grade != GRADE_MASKED:
                references.add(event.name)
            continue

        if event.action == DEFINE:
            candidates[event.name] = candidates.get(event.name, False) or event.definitive
            deleted.discard(event.name)
        elif event.action == MAYBE_DEFINE:
            if upper:
                candidates.setdefault(event.name, False)
                deleted.discard(event.name)
        else:  # use
            if event.grade == GRADE_CERTAIN:
                inputs.add(event.name)
            elif event.grade == GRADE_AMBIGUOUS and upper:
                inputs.add(event.name)
            if upper and event.role in _CANDIDATE_USE_ROLES:
                candidates.setdefault(event.name, False)

    while marker_pos < len(markers):
        marker = markers[marker_pos]
        if marker.top_level_unconditional:
            candidates.pop(marker.name, None)
            deleted.add(marker.name)
        marker_pos += 1

    if upper and aliases is not None:
        # hidden modifications: an in-place change through one name reaches
        # every previously defined name sharing the reference
        for name in sorted(candidates):
            for other in sorted(aliases.connected(name, up_to_cell=cell_index)):
                if other != name:
                    candidates.setdefault(other, False)

    return CellIOEstimate(
        inputs=frozenset(inputs),
        output_candidates=frozenset(candidates.items()),
        code_declarations=frozenset(declarations),
        code_references=frozenset(references),
        deletions=frozenset(deleted),
    )


def lower_estimate(events) -> CellIOEstimate:
    """Only what is certain from the cell's own syntax (no aliasing)."""
    evs, dels = _events_and_deletions(events)
    cell_index = events.cell_index if isinstance(events, CellEventReport) else None
    return _assemble(evs, dels, upper=False, aliases=None, cell_index=cell_index)


def upper_estimate(events, aliases: AliasStore | None = None) -> CellIOEstimate:
    """Certain plus possible items; a superset of the truth and of the lower."""
    evs, dels = _events_and_deletions(events)
    cell_index = events.cell_index if isinstance(events, CellEventReport) else None
    return _assemble(evs, dels, upper=True, aliases=aliases, cell_index=cell_index)


def estimate_pair(report: CellEventReport, aliases: AliasStore | None = None) -> EstimatePair:
    return EstimatePair(
        lower=lower_estimate(report),
        upper=upper_estimate(report, aliases),
        cell_index=report.cell_index,
    )


def compute_ambiguities(
    pair: EstimatePair,
    events: CellEventReport | list[NameEvent] | None = None,
    aliases: AliasStore | None = None,
) -> list[Ambiguity]:
    """Names in the upper but not the lower estimate, as resolvable items.

    Ordered by source position within the cell; alias-propagated candidates
    have no event of their own and sort first. Items whose name participates
    in a shared reference carry the verbatim statements that created it.
    """
    evs, _ = _events_and_deletions(events) if events is not None else ([], [])

    def first_position(name: str, kind: str) -> tuple[int, int]:
        for event in evs:
            if event.name != name:
                continue
            if kind == AMBIGUITY_INPUT and event.action == USE and event.grade == GRADE_AMBIGUOUS:
                return event.position
            if kind == AMBIGUITY_OUTPUT and (
                event.action == MAYBE_DEFINE or (event.action == USE and event.role in _CANDIDATE_USE_ROLES)
            ):
                return event.position
        return (0, 0)

    def alias_statements(name: str) -> tuple[str, ...] | None:
        if aliases is None:
            return None
        if len(aliases.connected(name, up_to_cell=pair.cell_index)) <= 1:
            return None
        return tuple(aliases.statements_for(name, up_to_cell=pair.cell_index))

    items: list[Ambiguity] = []
    for name in pair.upper.inputs - pair.lower.inputs:
        items.append(
            Ambiguity(pair.cell_index, name, AMBIGUITY_INPUT, alias_statements(name), first_position(name, AMBIGUITY_INPUT))
        )
    for name in pair.upper.candidate_names - pair.lower.candidate_names:
        items.append(
            Ambiguity(pair.cell_index, name, AMBIGUITY_OUTPUT, alias_statements(name), first_position(name, AMBIGUITY_OUTPUT))
        )
    items.sort(key=lambda a: (a.position, a.kind, a.name))
    return items
