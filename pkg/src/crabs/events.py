"""Per-cell syntax-tree walk producing an ordered stream of name events.

Each event records a definition or use of a name together with how certain it
is. The walk is path-sensitive within one pass over the cell:

* A use is ``masked`` when a definition certainly precedes it on its own
  execution path inside the cell, ``certain`` when no in-cell definition can
  precede its first execution, and ``ambiguous`` when reordering of branch
  executions inside a loop could place an in-cell definition before it (one
  branch order makes the name an inter-cell input, another does not).
* Definitions carry a ``definitive`` flag: an unconditional top-level
  rebinding supersedes all earlier definitions of the name, while conditional
  definitions and in-place mutations leave earlier definitions reachable.

Code inside function and lambda bodies is not analyzed for data flow (it only
runs when called, and globals read there are invisible to this analysis); it
is still scanned for references to user-defined functions and classes and for
``global``/``nonlocal`` keywords, which degrade coverage and are reported.
"""

from __future__ import annotations

import ast
import builtins
from dataclasses import dataclass, field

from .diagnostics import Diagnostic
from .ingest import CodeCell

DEFINE = "define"
USE = "use"
MAYBE_DEFINE = "maybe-define"

DATA = "data"
CODE = "code"

UNCONDITIONAL = "unconditional"
CONDITIONAL = "conditional"
LOOP_CONDITIONAL = "loop-conditional"

GRADE_CERTAIN = "certain"
GRADE_AMBIGUOUS = "ambiguous"
GRADE_MASKED = "masked"

_BUILTIN_NAMES = frozenset(dir(builtins)) | {"display", "get_ipython"}

# definition-state levels within a cell
_CERTAIN = 2
_MAYBE = 1


@dataclass(frozen=True)
class NameEvent:
    name: str
    action: str  # define | use | maybe-define
    kind: str  # data | code
    conditionality: str  # unconditional | conditional | loop-conditional
    position: tuple[int, int]
    role: str = "read"
    grade: str = GRADE_CERTAIN  # uses only: certain | ambiguous | masked
    definitive: bool = False  # defines only


@dataclass(frozen=True)
class DeletionMarker:
    """A ``del name`` site, anchored between events by sequence number."""

    name: str
    seq: int
    top_level_unconditional: bool
    position: tuple[int, int]


@dataclass
class AnalysisContext:
    """Name registries accumulated over the earlier cells of one notebook."""

    code_names: set[str] = field(default_factory=set)
    data_names: set[str] = field(default_factory=set)
    imported_names: set[str] = field(default_factory=set)
    track_imports: bool = False

    def update_from(self, report: "CellEventReport") -> None:
        self.code_names |= report.code_declared
        self.data_names |= report.data_defined
        self.imported_names |= report.imports_defined
        self.imported_names -= report.data_defined


@dataclass
class CellEventReport:
    cell_index: int
    events: list[NameEvent] = field(default_factory=list)
    deletions: list[DeletionMarker] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    code_declared: set[str] = field(default_factory=set)
    data_defined: set[str] = field(default_factory=set)
    imports_defined: set[str] = field(default_factory=set)


def parse_cell(cell: CodeCell) -> ast.Module:
    """Parse a screened cell into a syntax tree; raises SyntaxError."""
    text = cell.screened_text
    tree = ast.parse(text)
    tree._cell_source = text  # kept for verbatim statement extraction
    return tree


def collect_name_events(
    tree: ast.Module, context: AnalysisContext | None = None, cell_index: int = 0
) -> list[NameEvent]:
    """Ordered name events of one cell; see :func:`analyze_cell_tree`."""
    return analyze_cell_tree(tree, context, cell_index).events


def analyze_cell_tree(
    tree: ast.Module, context: AnalysisContext | None = None, cell_index: int = 0
) -> CellEventReport:
    walker = _Walker(context or AnalysisContext(), cell_index)
    walker.run(tree)
    return walker.report


def _pos(node: ast.AST) -> tuple[int, int]:
    return (getattr(node, "lineno", 0), getattr(node, "col_offset", 0))


def _cell_scope_decls(stmts) -> set[str]:
    """Names of def/class statements at cell scope (not nested in another scope)."""
    names: set[str] = set()
    stack = list(stmts)
    while stack:
        node = stack.pop()
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            names.add(node.name)
            continue
        if isinstance(node, ast.Lambda):
            continue
        stack.extend(ast.iter_child_nodes(node))
    return names


def _merge_states(parent: dict[str, int], branches: list[dict[str, int]]) -> dict[str, int]:
    """Join definition states over alternative paths: certain only if certain
    on every path, maybe if defined on some path."""
    merged = dict(parent)
    names: set[str] = set()
    for b in branches:
        names |= set(b)
    for name in names:
        levels = [b.get(name, 0) for b in branches]
        if min(levels) >= _CERTAIN:
            merged[name] = _CERTAIN
        elif max(levels) >= _MAYBE and merged.get(name, 0) < _CERTAIN:
            merged[name] = _MAYBE
    return merged


def _maybe_merge(before: dict[str, int], after_body: dict[str, int]) -> dict[str, int]:
    """Fold a zero-or-more-times body back into the pre-body state."""
    merged = dict(before)
    for name, level in after_body.items():
        if level >= _MAYBE and merged.get(name, 0) < _CERTAIN:
            merged[name] = _MAYBE
    return merged


def _pattern_names(pattern) -> list[str]:
    names = []
    for node in ast.walk(pattern):
        if isinstance(node, (ast.MatchAs, ast.MatchStar)) and node.name:
            names.append(node.name)
        elif isinstance(node, ast.MatchMapping) and node.rest:
            names.append(node.rest)
    return names


def _target_names(target) -> list[tuple[str, ast.AST]]:
    if isinstance(target, ast.Name):
        return [(target.id, target)]
    if isinstance(target, (ast.Tuple, ast.List)):
        names = []
        for elt in target.elts:
            names.extend(_target_names(elt))
        return names
    if isinstance(target, ast.Starred):
        return _target_names(target.value)
    return []


class _BindingScan(ast.NodeVisitor):
    """Collect names bound within a statement block, with branch-guard chains.

    Used to pre-scan loop bodies (which definitions could run on an earlier
    iteration) and function bodies (which names are function-local). Does not
    descend into nested function/class bodies; those bindings are scoped away,
    though the def/class names themselves bind here.
    """

    def __init__(self, base_guards: tuple = (), in_loop: bool = True):
        self.bindings: list[tuple[str, tuple[int, int], tuple]] = []
        self._guards: tuple = base_guards
        self._in_loop = in_loop

    def scan(self, stmts) -> None:
        for stmt in stmts:
            self.visit(stmt)

    def _bind(self, name: str, node: ast.AST) -> None:
        self.bindings.append((name, _pos(node), self._guards))

    def _bind_target(self, target: ast.AST) -> None:
        for name, node in _target_names(target):
            self._bind(name, node)
        # subscript/attribute stores mutate an object; they bind no name

    def visit_Assign(self, node):
        for t in node.targets:
            self._bind_target(t)
        self.visit(node.value)

    def visit_AnnAssign(self, node):
        if node.value is not None:
            self._bind_target(node.target)
            self.visit(node.value)

    def visit_AugAssign(self, node):
        self._bind_target(node.target)
        self.visit(node.value)

    def visit_NamedExpr(self, node):
        self._bind_target(node.target)
        self.visit(node.value)

    def visit_For(self, node):
        self.visit(node.iter)
        self._bind_target(node.target)
        self.scan(node.body)
        self.scan(node.orelse)

    visit_AsyncFor = visit_For

    def visit_While(self, node):
        self.visit(node.test)
        self.scan(node.body)
        self.scan(node.orelse)

    def visit_If(self, node):
        self.visit(node.test)
        outer = self._guards
        self._guards = outer + ((id(node), 0, self._in_loop),)
        self.scan(node.body)
        self._guards = outer + ((id(node), 1, self._in_loop),)
        self.scan(node.orelse)
        self._guards = outer

    def visit_Try(self, node):
        outer = self._guards
        self._guards = outer + ((id(node), 0, self._in_loop),)
        self.scan(node.body)
        self.scan(node.orelse)
        for i, handler in enumerate(node.handlers):
            self._guards = outer + ((id(node), i + 1, self._in_loop),)
            if handler.name:
                self._bind(handler.name, handler)
            self.scan(handler.body)
        self._guards = outer
        self.scan(node.finalbody)

    visit_TryStar = visit_Try

    def visit_With(self, node):
        for item in node.items:
            self.visit(item.context_expr)
            if item.optional_vars is not None:
                self._bind_target(item.optional_vars)
        self.scan(node.body)

    visit_AsyncWith = visit_With

    def visit_Match(self, node):
        self.visit(node.subject)
        outer = self._guards
        for i, case in enumerate(node.cases):
            self._guards = outer + ((id(node), i, self._in_loop),)
            for pat_name in _pattern_names(case.pattern):
                self.bindings.append((pat_name, _pos(case.pattern), self._guards))
            self.scan(case.body)
        self._guards = outer

    def visit_FunctionDef(self, node):
        self._bind(node.name, node)  # the name binds here; the body is another scope

    visit_AsyncFunctionDef = visit_FunctionDef
    visit_ClassDef = visit_FunctionDef

    def visit_Lambda(self, node):
        pass

    def visit_Import(self, node):
        for alias in node.names:
            self._bind(alias.asname or alias.name.split(".")[0], node)

    def visit_ImportFrom(self, node):
        for alias in node.names:
            if alias.name != "*":
                self._bind(alias.asname or alias.name, node)

    def _comp(self, node, result_exprs):
        # comprehension targets stay comp-local; walruses inside escape
        for gen in node.generators:
            self.visit(gen.iter)
            for if_ in gen.ifs:
                self.visit(if_)
        for expr in result_exprs:
            self.visit(expr)

    def visit_ListComp(self, node):
        self._comp(node, [node.elt])

    def visit_SetComp(self, node):
        self._comp(node, [node.elt])

    def visit_GeneratorExp(self, node):
        self._comp(node, [node.elt])

    def visit_DictComp(self, node):
        self._comp(node, [node.key, node.value])


@dataclass
class _LoopScope:
    defs: dict[str, list[tuple[tuple[int, int], tuple]]]


class _Walker:
    def __init__(self, context: AnalysisContext, cell_index: int):
        self.ctx = context
        self.report = CellEventReport(cell_index=cell_index)
        self.state: dict[str, int] = {}
        self.guards: tuple = ()  # ((site_id, branch_index, in_loop), ...)
        self.loops: list[_LoopScope] = []
        self.cond_regions = 0  # loop/try/comprehension bodies
        self.function_depth = 0
        self.local_scopes: list[set[str]] = []
        self.cell_code_names: set[str] = set()
        self.cell_imports: set[str] = set()
        self._function_conditionality: str | None = None

    def run(self, tree: ast.Module) -> None:
        self.cell_code_names = _cell_scope_decls(tree.body)
        self._visit_stmts(tree.body)

    # -- context helpers ---------------------------------------------------

    def _conditionality(self) -> str:
        if self._function_conditionality is not None:
            return self._function_conditionality
        if any(g[2] for g in self.guards):
            return LOOP_CONDITIONAL
        if self.guards or self.cond_regions:
            return CONDITIONAL
        return UNCONDITIONAL

    def _at_top_level(self) -> bool:
        return (
            self.function_depth == 0
            and not self.local_scopes
            and not self.guards
            and not self.loops
            and self.cond_regions == 0
        )

    def _known_code(self, name: str) -> bool:
        return name in self.ctx.code_names or name in self.cell_code_names

    def _known_import(self, name: str) -> bool:
        return name in self.ctx.imported_names or name in self.cell_imports

    def _in_local_scope(self, name: str) -> bool:
        return any(name in scope for scope in self.local_scopes)

    def _diag(self, code: str, message: str, node: ast.AST | None = None) -> None:
        line, col = _pos(node) if node is not None else (0, 0)
        self.report.diagnostics.append(
            Diagnostic(self.report.cell_index, code, message, line=line or None, column=col if node is not None else None)
        )

    # -- event emission ------------------------------------------------------

    def _grade_for(self, name: str, node: ast.AST) -> str:
        level = self.state.get(name, 0)
        if level >= _CERTAIN:
            return GRADE_MASKED
        if self.loops and self._order_mask_possible(name, node):
            return GRADE_AMBIGUOUS
        return GRADE_CERTAIN

    def _order_mask_possible(self, name: str, node: ast.AST) -> bool:
        """Could an in-loop definition precede this use's first execution
        under some branch execution order?

        Definitions strictly after the use on the use's own path cannot (their
        execution implies the use already ran); any other in-loop definition
        can reach the use through an earlier iteration or a sibling branch.
        """
        use_pos, use_guards = _pos(node), self.guards
        for def_pos, def_guards in self.loops[0].defs.get(name, ()):
            same_path_after = def_guards[: len(use_guards)] == use_guards and def_pos >= use_pos
            if not same_path_after:
                return True
        return False

    def _use(self, name: str, node: ast.AST, role: str = "read") -> None:
        if self._in_local_scope(name):
            return
        is_code = self._known_code(name)
        if self.function_depth > 0 and not is_code:
            return  # data flow inside function bodies is invisible here
        if not is_code:
            if self._known_import(name) and not self.ctx.track_imports:
                return
            known_data = name in self.state or name in self.ctx.data_names
            if not known_data and name in _BUILTIN_NAMES:
                return
        self.report.events.append(
            NameEvent(
                name=name,
                action=USE,
                kind=CODE if is_code else DATA,
                conditionality=self._conditionality(),
                position=_pos(node),
                role=role,
                grade=self._grade_for(name, node),
            )
        )

    def _define(self, name: str, node: ast.AST, role: str, kind: str = DATA, action: str = DEFINE) -> None:
        walrus_escape = role == "walrus" and self.function_depth == 0
        if self.function_depth > 0 or (self.local_scopes and not walrus_escape):
            if self.local_scopes:
                self.local_scopes[-1].add(name)
            return

        if kind == CODE and (name in self.ctx.data_names or name in self.report.data_defined):
            self._diag("name-reuse", f"function/class name {name!r} was previously a data variable", node)
        if kind == DATA and self._known_code(name):
            self._diag("name-reuse", f"data name {name!r} collides with a function/class declaration", node)
            return  # code wins: calls of the name keep resolving as code

        definitive = (
            action == DEFINE
            and kind == DATA
            and role in ("assign", "ann-assign", "aug-assign", "walrus", "with-as", "import")
            and self._conditionality() == UNCONDITIONAL
            and self._at_top_level()
        )
        if action == DEFINE:
            self.state[name] = _CERTAIN
        self.report.events.append(
            NameEvent(
                name=name,
                action=action,
                kind=kind,
                conditionality=self._conditionality(),
                position=_pos(node),
                role=role,
                definitive=definitive,
            )
        )
        if kind == CODE:
            self.report.code_declared.add(name)
        else:
            self.report.data_defined.add(name)

    # -- statements ------------------------------------------------------------

    def _visit_stmts(self, stmts) -> None:
        for stmt in stmts:
            self._visit_stmt(stmt)

    def _visit_stmt(self, stmt) -> None:
        method = getattr(self, f"_stmt_{type(stmt).__name__}", None)
        if method is not None:
            method(stmt)
            return
        for child in ast.iter_child_nodes(stmt):
            if isinstance(child, ast.expr):
                self._visit_expr(child)
            elif isinstance(child, ast.stmt):
                self._visit_stmt(child)

    def _stmt_Expr(self, node):
        self._visit_expr(node.value)

    def _stmt_Assign(self, node):
        self._visit_expr(node.value)
        for target in node.targets:
            self._assign_target(target, "assign")

    def _stmt_AnnAssign(self, node):
        self._visit_expr(node.annotation)
        if node.value is not None:
            self._visit_expr(node.value)
            self._assign_target(node.target, "ann-assign")

    def _stmt_AugAssign(self, node):
        if isinstance(node.target, ast.Name):
            self._use(node.target.id, node.target, role="read")
            self._visit_expr(node.value)
            self._define(node.target.id, node.target, "aug-assign")
        else:
            self._mutate_target(node.target)
            self._visit_expr(node.value)

    def _assign_target(self, target, role: str) -> None:
        if isinstance(target, ast.Name):
            self._define(target.id, target, role)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for elt in target.elts:
                self._assign_target(elt, role)
        elif isinstance(target, ast.Starred):
            self._assign_target(target.value, role)
        elif isinstance(target, (ast.Subscript, ast.Attribute)):
            self._mutate_target(target)

    def _mutate_target(self, target) -> None:
        """x[k] = v / x.a = v: certain input and non-definitive output for x."""
        root = target
        while isinstance(root, (ast.Subscript, ast.Attribute)):
            if isinstance(root, ast.Subscript):
                self._visit_expr(root.slice)
            root = root.value
        if isinstance(root, ast.Name):
            self._use(root.id, root, role="mutate")
            self._define(root.id, root, "mutate")
        else:
            self._visit_expr(root)

    def _stmt_Delete(self, node):
        for target in node.targets:
            if isinstance(target, ast.Name):
                if self.function_depth == 0 and not self._in_local_scope(target.id):
                    top = self._conditionality() == UNCONDITIONAL and self._at_top_level()
                    self.report.deletions.append(
                        DeletionMarker(target.id, len(self.report.events), top, _pos(target))
                    )
                    self.state.pop(target.id, None)
            elif isinstance(target, (ast.Subscript, ast.Attribute)):
                self._mutate_target(target)

    def _stmt_If(self, node):
        self._visit_expr(node.test)
        before = dict(self.state)
        outer_guards = self.guards
        in_loop = bool(self.loops)

        self.guards = outer_guards + ((id(node), 0, in_loop),)
        self.state = dict(before)
        self._visit_stmts(node.body)
        body_state = self.state

        self.guards = outer_guards + ((id(node), 1, in_loop),)
        self.state = dict(before)
        self._visit_stmts(node.orelse)
        else_state = self.state

        self.guards = outer_guards
        self.state = _merge_states(before, [body_state, else_state])

    def _enter_loop(self, node, extra_defs=()):
        scanner = _BindingScan(self.guards, in_loop=True)
        scanner.scan(node.body)
        defs: dict[str, list] = {}
        for name, pos, guards in list(scanner.bindings) + list(extra_defs):
            defs.setdefault(name, []).append((pos, guards))
        self.loops.append(_LoopScope(defs))
        self.cond_regions += 1
        return dict(self.state)

    def _exit_loop(self, before) -> None:
        body_state = self.state
        self.cond_regions -= 1
        self.loops.pop()
        self.state = _maybe_merge(before, body_state)

    def _stmt_For(self, node):
        self._visit_expr(node.iter, role="iterable")
        target_names = _target_names(node.target)
        extra = [(name, _pos(tnode), self.guards) for name, tnode in target_names]
        before = self._enter_loop(node, extra)
        for name, tnode in target_names:
            if self.function_depth == 0 and not self._in_local_scope(name):
                self._define(name, tnode, "loop-target", action=MAYBE_DEFINE)
                self.state[name] = _CERTAIN  # bound before every body execution
        self._visit_stmts(node.body)
        self._exit_loop(before)
        if node.orelse:
            self.cond_regions += 1
            self._visit_stmts(node.orelse)
            self.cond_regions -= 1

    _stmt_AsyncFor = _stmt_For

    def _stmt_While(self, node):
        self._visit_expr(node.test)
        before = self._enter_loop(node)
        self._visit_stmts(node.body)
        self._exit_loop(before)
        if node.orelse:
            self.cond_regions += 1
            self._visit_stmts(node.orelse)
            self.cond_regions -= 1

    def _stmt_With(self, node):
        for item in node.items:
            self._visit_expr(item.context_expr)
            if item.optional_vars is not None:
                self._assign_target(item.optional_vars, "with-as")
        self._visit_stmts(node.body)

    _stmt_AsyncWith = _stmt_With

    def _stmt_Try(self, node):
        before = dict(self.state)
        outer_guards = self.guards
        in_loop = bool(self.loops)

        self.guards = outer_guards + ((id(node), 0, in_loop),)
        self.cond_regions += 1
        self._visit_stmts(node.body)
        self._visit_stmts(node.orelse)
        self.cond_regions -= 1
        main_state = self.state

        handler_states = []
        for i, handler in enumerate(node.handlers):
            self.guards = outer_guards + ((id(node), i + 1, in_loop),)
            self.state = _maybe_merge(before, main_state)
            self.cond_regions += 1
            if handler.type is not None:
                self._visit_expr(handler.type)
            if handler.name:
                self._define(handler.name, handler, "except-as")
            self._visit_stmts(handler.body)
            self.cond_regions -= 1
            handler_states.append(self.state)

        self.guards = outer_guards
        self.state = _merge_states(before, [main_state] + handler_states) if handler_states else main_state
        self._visit_stmts(node.finalbody)

    _stmt_TryStar = _stmt_Try

    def _stmt_Match(self, node):
        self._visit_expr(node.subject)
        before = dict(self.state)
        outer_guards = self.guards
        in_loop = bool(self.loops)
        case_states = [dict(before)]  # no case may match
        for i, case in enumerate(node.cases):
            self.guards = outer_guards + ((id(node), i, in_loop),)
            self.state = dict(before)
            for name in _pattern_names(case.pattern):
                self._define(name, case.pattern, "match-capture")
            for sub in ast.walk(case.pattern):
                if isinstance(sub, ast.MatchValue):
                    self._visit_expr(sub.value)
            if case.guard is not None:
                self._visit_expr(case.guard)
            self._visit_stmts(case.body)
            case_states.append(self.state)
        self.guards = outer_guards
        self.state = _merge_states(before, case_states)

    def _stmt_FunctionDef(self, node):
        for dec in node.decorator_list:
            self._visit_expr(dec)
        self._visit_arg_defaults(node.args)
        if node.returns is not None:
            self._visit_expr(node.returns)
        self._define(node.name, node, "func-def", kind=CODE)
        self._walk_function_body(node.args, node.body)

    _stmt_AsyncFunctionDef = _stmt_FunctionDef

    def _visit_arg_defaults(self, args: ast.arguments) -> None:
        for default in list(args.defaults) + [d for d in args.kw_defaults if d is not None]:
            self._visit_expr(default)
        for a in args.posonlyargs + args.args + args.kwonlyargs + [args.vararg, args.kwarg]:
            if a is not None and a.annotation is not None:
                self._visit_expr(a.annotation)

    def _walk_function_body(self, args: ast.arguments, body) -> None:
        scanner = _BindingScan()
        scanner.scan(body)
        local = {name for name, _, _ in scanner.bindings}
        local |= {a.arg for a in args.posonlyargs + args.args + args.kwonlyargs}
        if args.vararg:
            local.add(args.vararg.arg)
        if args.kwarg:
            local.add(args.kwarg.arg)

        outer_label = self._function_conditionality
        if self.function_depth == 0:
            self._function_conditionality = self._conditionality()
        self.function_depth += 1
        self.local_scopes.append(local)
        self._visit_stmts(body)
        self.local_scopes.pop()
        self.function_depth -= 1
        self._function_conditionality = outer_label

    def _stmt_ClassDef(self, node):
        for dec in node.decorator_list:
            self._visit_expr(dec)
        for base in node.bases:
            self._visit_expr(base)
        for kw in node.keywords:
            self._visit_expr(kw.value)
        self._define(node.name, node, "class-def", kind=CODE)
        # class bodies run at definition time: reads are real, bindings become attributes
        scanner = _BindingScan()
        scanner.scan(node.body)
        self.local_scopes.append({name for name, _, _ in scanner.bindings})
        self._visit_stmts(node.body)
        self.local_scopes.pop()

    def _stmt_Import(self, node):
        self._handle_import([alias.asname or alias.name.split(".")[0] for alias in node.names], node)

    def _stmt_ImportFrom(self, node):
        names = []
        for alias in node.names:
            if alias.name == "*":
                self._diag("star-import", f"cannot track names of 'from {node.module} import *'", node)
                continue
            names.append(alias.asname or alias.name)
        self._handle_import(names, node)

    def _handle_import(self, names: list[str], node) -> None:
        if self.function_depth > 0 or self.local_scopes:
            return
        for name in names:
            if self.ctx.track_imports:
                self._define(name, node, "import")
            else:
                self.cell_imports.add(name)
                self.report.imports_defined.add(name)
                self.state[name] = _CERTAIN

    def _stmt_Global(self, node):
        if self.function_depth > 0:
            self._diag(
                "global-in-function",
                f"global {', '.join(node.names)} inside a function: its data flow is not tracked",
                node,
            )

    def _stmt_Nonlocal(self, node):
        if self.function_depth > 0:
            self._diag("nonlocal-in-function", f"nonlocal {', '.join(node.names)} inside a function", node)

    def _stmt_Return(self, node):
        if node.value is not None:
            self._visit_expr(node.value)

    def _stmt_Assert(self, node):
        self._visit_expr(node.test)
        if node.msg is not None:
            self._visit_expr(node.msg)

    def _stmt_Raise(self, node):
        if node.exc is not None:
            self._visit_expr(node.exc)
        if node.cause is not None:
            self._visit_expr(node.cause)

    def _stmt_Pass(self, node):
        pass

    _stmt_Break = _stmt_Pass
    _stmt_Continue = _stmt_Pass

    # -- expressions -------------------------------------------------------------

    def _visit_expr(self, node, role: str = "read") -> None:
        if node is None:
            return
        method = getattr(self, f"_expr_{type(node).__name__}", None)
        if method is not None:
            method(node, role)
            return
        for child in ast.iter_child_nodes(node):
            if isinstance(child, ast.expr):
                self._visit_expr(child)

    def _expr_Name(self, node, role):
        if isinstance(node.ctx, ast.Load):
            self._use(node.id, node, role=role)

    def _expr_Call(self, node, role):
        func = node.func
        if isinstance(func, ast.Name):
            self._use(func.id, func, role="read")
        elif isinstance(func, (ast.Attribute, ast.Subscript)):
            root = func
            while isinstance(root, (ast.Attribute, ast.Subscript)):
                if isinstance(root, ast.Subscript):
                    self._visit_expr(root.slice)
                root = root.value
            if isinstance(root, ast.Name):
                self._use(root.id, root, role="call-base")
            else:
                self._visit_expr(root)
        else:
            self._visit_expr(func)
        for arg in node.args:
            if isinstance(arg, ast.Name):
                self._visit_expr(arg, role="call-arg")
            elif isinstance(arg, ast.Starred) and isinstance(arg.value, ast.Name):
                self._visit_expr(arg.value, role="call-arg")
            else:
                self._visit_expr(arg)
        for kw in node.keywords:
            if isinstance(kw.value, ast.Name):
                self._visit_expr(kw.value, role="call-arg")
            else:
                self._visit_expr(kw.value)

    def _expr_NamedExpr(self, node, role):
        self._visit_expr(node.value)
        if isinstance(node.target, ast.Name):
            self._define(node.target.id, node.target, "walrus")

    def _expr_Lambda(self, node, role):
        self._visit_arg_defaults(node.args)
        body = ast.Expr(value=node.body)
        ast.copy_location(body, node.body)
        self._walk_function_body(node.args, [body])

    def _comprehension(self, node, result_exprs) -> None:
        generators = node.generators
        self._visit_expr(generators[0].iter, role="iterable")
        comp_locals: set[str] = set()
        for gen in generators:
            comp_locals |= {name for name, _ in _target_names(gen.target)}
        self.local_scopes.append(comp_locals)
        self.cond_regions += 1
        for i, gen in enumerate(generators):
            if i > 0:
                self._visit_expr(gen.iter, role="iterable")
            for if_ in gen.ifs:
                self._visit_expr(if_)
        for expr in result_exprs:
            self._visit_expr(expr)
        self.cond_regions -= 1
        self.local_scopes.pop()

    def _expr_ListComp(self, node, role):
        self._comprehension(node, [node.elt])

    def _expr_SetComp(self, node, role):
        self._comprehension(node, [node.elt])

    def _expr_GeneratorExp(self, node, role):
        self._comprehension(node, [node.elt])

    def _expr_DictComp(self, node, role):
        self._comprehension(node, [node.key, node.value])
