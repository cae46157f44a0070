"""Ambiguity resolution: per-cell binary questions answered by a pluggable
backend.

An ambiguity is one (cell, name, kind) item present in the upper but not the
lower estimate. Each is resolved independently with a yes/no question about a
single cell; a resolver can only confirm or reject names the syntactic phase
proposed, so no resolver can invent a variable. Backends: an HTTP
chat-completion endpoint, a table of known mutating/pure call patterns, a
replay cache, a ground-truth oracle, and the two constant resolvers that
reproduce the upper (assume-yes) and lower (assume-no) estimates.
"""

from __future__ import annotations

import ast
import hashlib
import json
import logging
import os
import threading
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CacheMissError, ResolverError, UnparseableResponseError
from .ingest import CellSequence, CodeCell

logger = logging.getLogger(__name__)

AMBIGUITY_INPUT = "input"
AMBIGUITY_OUTPUT = "output-candidate"

RESOLVERS = ("llm-http", "heuristic", "replay", "truth-oracle", "assume-yes", "assume-no")

TEMPLATE_VERSION = "1"
_INPUT_QUESTION = "Is {name} used as an input by this cell?"
_OUTPUT_QUESTION = "Could this cell define or modify {name}, making it available to later cells?"

API_KEY_ENV = "CRABS_API_KEY"


@dataclass(frozen=True)
class Ambiguity:
    cell_index: int
    name: str
    kind: str  # input | output-candidate
    alias_context: tuple[str, ...] | None = None
    position: tuple[int, int] = (0, 0)

    def key(self) -> tuple[int, str, str]:
        return (self.cell_index, self.name, self.kind)


@dataclass(frozen=True)
class ResolutionRecord:
    ambiguity: Ambiguity
    verdict: bool
    resolver_id: str
    prompt_hash: str
    raw_response: str | None = None


@dataclass
class ResolverConfig:
    resolver: str = "assume-no"
    endpoint_url: str | None = None
    model_name: str | None = None
    temperature: float = 0.0
    on_unparseable: str = "fail"  # fail | assume-yes | assume-no
    cache_path: str | None = None
    truth_path: str | None = None
    max_concurrency: int = 4
    request_timeout: float = 60.0
    # verdicts for call patterns the heuristic table does not know
    heuristic_defaults: dict = field(default_factory=lambda: {AMBIGUITY_INPUT: True, AMBIGUITY_OUTPUT: False})


def build_prompt(cell: CodeCell, ambiguity: Ambiguity) -> str:
    """Deterministic single-cell prompt with a binary question.

    Contains only this cell's code plus, when the name participates in a
    shared reference, the earlier statements that created the links. Nothing
    from later cells ever appears.
    """
    name = ambiguity.name
    lines = [
        "You are analyzing one code cell of a Python notebook in isolation.",
        "",
        "Code cell:",
        "```python",
        cell.screened_text,
        "```",
    ]
    if ambiguity.alias_context:
        lines += [
            "",
            f"Statements from earlier cells created shared references involving {name}:",
            "```python",
            *ambiguity.alias_context,
            "```",
        ]
    question = _INPUT_QUESTION if ambiguity.kind == AMBIGUITY_INPUT else _OUTPUT_QUESTION
    lines += [
        "",
        f"Question: {question.format(name=name)}",
        "Answer with exactly one word: yes or no.",
    ]
    return "\n".join(lines)


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(f"{TEMPLATE_VERSION}\x00{prompt}".encode("utf-8")).hexdigest()


def parse_verdict(response: str) -> bool:
    """First-token yes/no, case-insensitive, punctuation stripped."""
    tokens = response.split()
    if tokens:
        head = tokens[0].strip("\"'`.,:;!?()[]{}<>*_-").lower()
        if head == "yes":
            return True
        if head == "no":
            return False
    raise UnparseableResponseError(response)


# -- backends ---------------------------------------------------------------


def _apply_unparseable_policy(exc: UnparseableResponseError, config: ResolverConfig) -> bool:
    if config.on_unparseable == "assume-yes":
        logger.warning("unparseable resolver response %r; assuming yes", exc.raw_response)
        return True
    if config.on_unparseable == "assume-no":
        logger.warning("unparseable resolver response %r; assuming no", exc.raw_response)
        return False
    raise exc


def _post_chat_completion(config: ResolverConfig, prompt: str, ambiguity: Ambiguity) -> str:
    body = json.dumps(
        {
            "model": config.model_name or "",
            "temperature": config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
    ).encode("utf-8")
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"

    last_error: Exception | None = None
    for attempt in range(2):  # one retry on transport failure only
        request = urllib.request.Request(config.endpoint_url, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(request, timeout=config.request_timeout) as response:
                payload = json.load(response)
            break
        except (urllib.error.URLError, TimeoutError, ConnectionError) as exc:
            last_error = exc
            if attempt == 0:
                logger.warning("transport error (%s); retrying once", exc)
                continue
            raise ResolverError(
                f"endpoint failed twice resolving cell {ambiguity.cell_index} {ambiguity.kind} "
                f"{ambiguity.name!r}: {exc}"
            ) from exc
    else:  # pragma: no cover - loop always breaks or raises
        raise ResolverError(str(last_error))

    try:
        return payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise ResolverError(
            f"malformed endpoint payload resolving cell {ambiguity.cell_index} "
            f"{ambiguity.kind} {ambiguity.name!r}: {payload!r}"
        ) from exc


# Call patterns with known in-place behaviour, used by the offline heuristic.
MUTATING_METHODS = frozenset(
    {
        "append", "extend", "insert", "remove", "pop", "popitem", "clear",
        "sort", "reverse", "update", "add", "discard", "setdefault",
        "fit", "fit_transform", "partial_fit", "load_state_dict",
        "fill", "put", "resize", "setflags", "rename_axis", "set_axis",
    }
)
PURE_METHODS = frozenset(
    {
        "head", "tail", "describe", "info", "mean", "median", "sum", "std", "var",
        "min", "max", "count", "value_counts", "nunique", "unique", "truncate",
        "sample", "copy", "get", "keys", "values", "items", "index",
        "to_csv", "to_numpy", "to_dict", "to_frame", "to_list", "tolist",
        "plot", "hist", "show", "groupby", "merge", "join", "filter", "select",
        "predict", "predict_proba", "score", "transform", "corr", "isnull",
        "isna", "notnull", "shape", "startswith", "endswith", "split", "strip",
        "format", "lower", "upper",
    }
)
# functions that mutate an argument passed to them / that never do
ARG_MUTATING_FUNCTIONS = frozenset({"shuffle", "setattr", "heapify", "heappush"})
PURE_FUNCTIONS = frozenset(
    {
        "print", "len", "display", "type", "repr", "str", "int", "float",
        "list", "dict", "set", "tuple", "sorted", "sum", "max", "min",
        "enumerate", "zip", "range", "isinstance", "abs", "round",
    }
)


def _alias_partner_names(ambiguity: Ambiguity) -> set[str]:
    names: set[str] = set()
    for statement in ambiguity.alias_context or ():
        try:
            tree = ast.parse(statement)
        except SyntaxError:
            continue
        names |= {node.id for node in ast.walk(tree) if isinstance(node, ast.Name)}
    names.discard(ambiguity.name)
    return names


def _heuristic_output_verdict(cell: CodeCell, name: str, default: bool) -> bool:
    try:
        tree = ast.parse(cell.screened_text)
    except SyntaxError:
        return default
    verdicts: list[bool] = []
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        func = node.func
        if isinstance(func, ast.Attribute):
            root = func.value
            while isinstance(root, (ast.Attribute, ast.Subscript)):
                root = root.value
            if isinstance(root, ast.Name) and root.id == name:
                if any(kw.arg == "inplace" and getattr(kw.value, "value", None) is True for kw in node.keywords):
                    verdicts.append(True)
                elif func.attr in MUTATING_METHODS:
                    verdicts.append(True)
                elif func.attr in PURE_METHODS:
                    verdicts.append(False)
                else:
                    verdicts.append(default)
        func_name = func.id if isinstance(func, ast.Name) else (func.attr if isinstance(func, ast.Attribute) else None)
        for arg in node.args:
            if isinstance(arg, ast.Name) and arg.id == name:
                if func_name in ARG_MUTATING_FUNCTIONS:
                    verdicts.append(True)
                elif func_name in PURE_FUNCTIONS:
                    verdicts.append(False)
                else:
                    verdicts.append(default)
    if not verdicts:
        return default
    return any(verdicts)


class _ReplayCache:
    def __init__(self, path: str):
        self.path = Path(path)
        self.entries: dict[str, dict] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    record = json.loads(line)
                    self.entries[record["prompt_hash"]] = record

    def lookup(self, prompt_hash: str) -> dict:
        if prompt_hash not in self.entries:
            raise CacheMissError(prompt_hash)
        return self.entries[prompt_hash]


_cache_write_lock = threading.Lock()


def append_cache_records(cache_path: str, records: list[ResolutionRecord]) -> None:
    """Append resolution records to a JSON-lines cache (one object per line)."""
    path = Path(cache_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _cache_write_lock:
        with path.open("a", encoding="utf-8") as handle:
            for record in records:
                handle.write(
                    json.dumps(
                        {
                            "prompt_hash": record.prompt_hash,
                            "verdict": record.verdict,
                            "raw_response": record.raw_response,
                            "resolver_id": record.resolver_id,
                            "template_version": TEMPLATE_VERSION,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )


def _load_truth_flows(truth_path: str, notebook_id: str) -> set[tuple[int, int, str]]:
    path = Path(truth_path)
    candidates: list[Path]
    if path.is_dir():
        candidates = sorted(path.glob("*.json"))
    else:
        candidates = [path]
    for candidate in candidates:
        data = json.loads(candidate.read_text(encoding="utf-8"))
        if not notebook_id or data.get("notebook_id") == notebook_id or len(candidates) == 1:
            return {(f["source"], f["target"], f["name"]) for f in data.get("flows", [])}
    raise ResolverError(f"no ground-truth annotation for notebook {notebook_id!r} under {truth_path}")


def _truth_verdict(ambiguity: Ambiguity, flows: set[tuple[int, int, str]]) -> bool:
    if ambiguity.kind == AMBIGUITY_INPUT:
        return any(t == ambiguity.cell_index and name == ambiguity.name for _, t, name in flows)
    return any(s == ambiguity.cell_index and name == ambiguity.name for s, _, name in flows)


def resolve_all(
    ambiguities: list[Ambiguity],
    cells: CellSequence,
    config: ResolverConfig,
    ground_truth=None,
) -> list[ResolutionRecord]:
    """One record per ambiguity, in input order.

    Queries are independent, so the HTTP backend fans them out concurrently
    (bounded by ``max_concurrency``); every other backend is local and runs
    sequentially.
    """
    if config.resolver not in RESOLVERS:
        raise ResolverError(f"unknown resolver {config.resolver!r}; expected one of {', '.join(RESOLVERS)}")
    if not ambiguities:
        return []

    prompts = [build_prompt(cells.cell(a.cell_index), a) for a in ambiguities]
    hashes = [prompt_digest(p) for p in prompts]
    resolver = config.resolver
    resolver_id = resolver if resolver != "llm-http" else f"llm-http:{config.model_name or 'default'}"

    if resolver in ("assume-yes", "assume-no"):
        verdict = resolver == "assume-yes"
        outcomes: list[tuple[bool, str | None]] = [(verdict, None)] * len(ambiguities)
    elif resolver == "truth-oracle":
        if ground_truth is not None:
            flows = {(f.source, f.target, f.name) for f in ground_truth.flows}
        elif config.truth_path:
            flows = _load_truth_flows(config.truth_path, cells.notebook_id)
        else:
            raise ResolverError("truth-oracle resolver needs a ground-truth annotation (truth_path)")
        outcomes = [(_truth_verdict(a, flows), None) for a in ambiguities]
    elif resolver == "heuristic":
        outcomes = []
        for ambiguity in ambiguities:
            default = bool(config.heuristic_defaults.get(ambiguity.kind, False))
            if ambiguity.kind == AMBIGUITY_OUTPUT:
                cell = cells.cell(ambiguity.cell_index)
                verdict = _heuristic_output_verdict(cell, ambiguity.name, default)
                if not verdict:
                    # hidden modification: a shared-reference partner mutated
                    # in this cell also changes what this name sees
                    verdict = any(
                        _heuristic_output_verdict(cell, partner, False)
                        for partner in sorted(_alias_partner_names(ambiguity))
                    )
            else:
                verdict = default
            outcomes.append((verdict, None))
    elif resolver == "replay":
        if not config.cache_path:
            raise ResolverError("replay resolver needs cache_path")
        cache = _ReplayCache(config.cache_path)
        outcomes = []
        for prompt_hash in hashes:
            entry = cache.lookup(prompt_hash)
            outcomes.append((bool(entry["verdict"]), entry.get("raw_response")))
    else:  # llm-http
        if not config.endpoint_url:
            raise ResolverError("llm-http resolver needs endpoint_url")

        def ask(item: tuple[Ambiguity, str]) -> tuple[bool, str | None]:
            ambiguity, prompt = item
            text = _post_chat_completion(config, prompt, ambiguity)
            try:
                return parse_verdict(text), text
            except UnparseableResponseError as exc:
                return _apply_unparseable_policy(exc, config), text

        items = list(zip(ambiguities, prompts))
        if len(items) > 1 and config.max_concurrency > 1:
            with ThreadPoolExecutor(max_workers=min(config.max_concurrency, len(items))) as pool:
                outcomes = list(pool.map(ask, items))
        else:
            outcomes = [ask(item) for item in items]

    records = [
        ResolutionRecord(ambiguity, verdict, resolver_id, prompt_hash, raw)
        for ambiguity, prompt_hash, (verdict, raw) in zip(ambiguities, hashes, outcomes)
    ]
    if resolver == "llm-http" and config.cache_path:
        append_cache_records(config.cache_path, records)
    return records
