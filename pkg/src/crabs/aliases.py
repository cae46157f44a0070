"""Tracking of shared references between names.

Two names can be bound to one mutable object, so an in-place change through
one silently changes what the other sees. Only the two explicitly visible
mechanisms are tracked: direct assignment between names (``x = y``) and
inclusion of names in list/tuple/dict literals (``xs = [a, b]``). Rebinding a
name to a fresh literal or call result severs its existing links.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

ASSIGNMENT = "assignment"
CONTAINMENT = "collection-containment"


@dataclass(frozen=True)
class AliasEdge:
    a: str
    b: str
    tag: str  # assignment | collection-containment
    cell_index: int
    statement: str
    position: tuple[int, int]


class AliasStore:
    """Undirected alias links; queries return whole connected components."""

    def __init__(self):
        self.edges: list[AliasEdge] = []
        self.known_names: set[str] = set()

    def add_edge(self, a: str, b: str, tag: str, cell_index: int, statement: str, position) -> None:
        if a == b:
            return
        self.edges.append(AliasEdge(a, b, tag, cell_index, statement, tuple(position)))

    def sever(self, name: str) -> None:
        self.edges = [e for e in self.edges if name not in (e.a, e.b)]

    def _component_edges(self, name: str, up_to_cell: int | None = None) -> list[AliasEdge]:
        edges = self.edges if up_to_cell is None else [e for e in self.edges if e.cell_index <= up_to_cell]
        adjacency: dict[str, list[AliasEdge]] = {}
        for e in edges:
            adjacency.setdefault(e.a, []).append(e)
            adjacency.setdefault(e.b, []).append(e)
        seen = {name}
        member_edges: list[AliasEdge] = []
        stack = [name]
        visited_edges: set[int] = set()
        while stack:
            current = stack.pop()
            for e in adjacency.get(current, ()):
                if id(e) not in visited_edges:
                    visited_edges.add(id(e))
                    member_edges.append(e)
                other = e.b if e.a == current else e.a
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        return member_edges

    def connected(self, name: str, up_to_cell: int | None = None) -> frozenset[str]:
        members = {name}
        for e in self._component_edges(name, up_to_cell):
            members.add(e.a)
            members.add(e.b)
        return frozenset(members)

    def is_connected(self, a: str, b: str, up_to_cell: int | None = None) -> bool:
        return b in self.connected(a, up_to_cell)

    def statements_for(self, name: str, up_to_cell: int | None = None) -> list[str]:
        """Verbatim statements that created the name's alias links, in order."""
        edges = sorted(self._component_edges(name, up_to_cell), key=lambda e: (e.cell_index, e.position))
        statements: list[str] = []
        for e in edges:
            if e.statement not in statements:
                statements.append(e.statement)
        return statements


def _literal_names(node) -> list[ast.Name]:
    """Bare names stored inside (possibly nested) list/tuple/dict literals."""
    names: list[ast.Name] = []
    if isinstance(node, (ast.List, ast.Tuple)):
        for elt in node.elts:
            if isinstance(elt, ast.Name):
                names.append(elt)
            elif isinstance(elt, ast.Starred) and isinstance(elt.value, ast.Name):
                names.append(elt.value)
            else:
                names.extend(_literal_names(elt))
    elif isinstance(node, ast.Dict):
        for value in node.values:
            if isinstance(value, ast.Name):
                names.append(value)
            else:
                names.extend(_literal_names(value))
    return names


def update_alias_store(tree: ast.Module, store: AliasStore, cell_index: int) -> AliasStore:
    """Fold one cell's assignments into the store.

    Unconditional top-level rebinds sever the target's previous links;
    conditional ones only add possible links (over-approximation).
    """
    source = getattr(tree, "_cell_source", None)

    def statement_text(node) -> str:
        if source is not None:
            segment = ast.get_source_segment(source, node)
            if segment is not None:
                return segment
        return ast.unparse(node)

    def handle_binding(target, value, stmt, unconditional: bool) -> None:
        if isinstance(target, ast.Name):
            if unconditional:
                store.sever(target.id)
            if isinstance(value, ast.Name):
                if value.id in store.known_names:
                    store.add_edge(target.id, value.id, ASSIGNMENT, cell_index, statement_text(stmt), _node_pos(stmt))
            else:
                for elt in _literal_names(value):
                    if elt.id in store.known_names:
                        store.add_edge(target.id, elt.id, CONTAINMENT, cell_index, statement_text(stmt), _node_pos(stmt))
            store.known_names.add(target.id)
        elif isinstance(target, (ast.Tuple, ast.List)):
            if isinstance(value, (ast.Tuple, ast.List)) and len(value.elts) == len(target.elts):
                for t, v in zip(target.elts, value.elts):
                    handle_binding(t, v, stmt, unconditional)
            else:
                for t in target.elts:
                    if isinstance(t, ast.Name):
                        if unconditional:
                            store.sever(t.id)
                        store.known_names.add(t.id)

    def walk(stmts, unconditional: bool) -> None:
        for stmt in stmts:
            if isinstance(stmt, ast.Assign):
                for target in stmt.targets:
                    handle_binding(target, stmt.value, stmt, unconditional)
            elif isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
                handle_binding(stmt.target, stmt.value, stmt, unconditional)
            elif isinstance(stmt, ast.AugAssign):
                if isinstance(stmt.target, ast.Name):
                    store.known_names.add(stmt.target.id)
            elif isinstance(stmt, ast.Delete):
                for target in stmt.targets:
                    if isinstance(target, ast.Name) and unconditional:
                        store.sever(target.id)
            elif isinstance(stmt, (ast.For, ast.AsyncFor)):
                for name, _ in _names_of(stmt.target):
                    store.known_names.add(name)
                walk(stmt.body, False)
                walk(stmt.orelse, False)
            elif isinstance(stmt, ast.While):
                walk(stmt.body, False)
                walk(stmt.orelse, False)
            elif isinstance(stmt, ast.If):
                walk(stmt.body, False)
                walk(stmt.orelse, False)
            elif isinstance(stmt, (ast.With, ast.AsyncWith)):
                for item in stmt.items:
                    if item.optional_vars is not None:
                        for name, _ in _names_of(item.optional_vars):
                            if unconditional:
                                store.sever(name)
                            store.known_names.add(name)
                walk(stmt.body, unconditional)
            elif isinstance(stmt, ast.Try):
                walk(stmt.body, False)
                for handler in stmt.handlers:
                    walk(handler.body, False)
                walk(stmt.orelse, False)
                walk(stmt.finalbody, unconditional)
            elif isinstance(stmt, ast.Match):
                for case in stmt.cases:
                    walk(case.body, False)
            # def/class bodies are separate scopes; their assignments are local

    walk(tree.body, True)
    return store


def _names_of(target) -> list[tuple[str, ast.AST]]:
    if isinstance(target, ast.Name):
        return [(target.id, target)]
    if isinstance(target, (ast.Tuple, ast.List)):
        out = []
        for elt in target.elts:
            out.extend(_names_of(elt))
        return out
    if isinstance(target, ast.Starred):
        return _names_of(target.value)
    return []


def _node_pos(node) -> tuple[int, int]:
    return (getattr(node, "lineno", 0), getattr(node, "col_offset", 0))
