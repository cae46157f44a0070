"""Command-line interface: analyze notebooks, evaluate predictions, export graphs."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import CacheMissError, CrabsError, ResolverError
from .evaluate import aggregate, load_ground_truth, score_notebook
from .pipeline import analyze_notebook
from .resolve import RESOLVERS, ResolverConfig
from .serialize import dump_json, load_graph_json, result_to_dict, to_dot

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ANALYSIS_FAILURES = 2
EXIT_RESOLVER_FAILURE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crabs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze notebooks into graph JSON files")
    analyze.add_argument("notebooks", nargs="+", help="notebook files (.ipynb)")
    analyze.add_argument("--mode", choices=("lower", "upper", "resolved"), default="resolved")
    analyze.add_argument("--resolver", choices=RESOLVERS)
    analyze.add_argument("--endpoint", help="chat-completion endpoint URL for --resolver llm-http")
    analyze.add_argument("--model", help="model name sent to the endpoint")
    analyze.add_argument("--temperature", type=float, default=0.0)
    analyze.add_argument("--cache", help="JSON-lines verdict cache (written by llm-http, read by replay)")
    analyze.add_argument("--on-unparseable", choices=("fail", "assume-yes", "assume-no"), default="fail")
    analyze.add_argument("--truth", help="annotation file or directory for --resolver truth-oracle")
    analyze.add_argument("--track-imports", action="store_true", help="treat imported names as information units")
    analyze.add_argument("--out", default=".", help="output directory for graph JSON files")
    analyze.add_argument("--jobs", type=int, default=1, help="notebooks analyzed in parallel")

    evaluate = sub.add_parser("eval", help="score predicted graphs against annotations")
    evaluate.add_argument("--pred", required=True, help="directory of *.graph.json predictions")
    evaluate.add_argument("--truth", required=True, help="directory of annotation JSON files")
    evaluate.add_argument("--out", help="metrics JSON output file")

    export = sub.add_parser("export", help="render a graph JSON file")
    export.add_argument("--graph", required=True, help="graph JSON file from 'crabs analyze'")
    export.add_argument("--format", choices=("dot", "json"), default="dot")
    export.add_argument("--view", choices=("flows", "deps"), default="flows")
    export.add_argument("--out", help="output file (default: stdout)")
    return parser


def _analyze_one(path_str: str, args) -> tuple[str, str | None]:
    """Returns (notebook path, error message or None)."""
    path = Path(path_str)
    try:
        document = path.read_bytes()
    except OSError as exc:
        return path_str, f"unreadable: {exc}"
    config = ResolverConfig(
        resolver=args.resolver or "assume-no",
        endpoint_url=args.endpoint,
        model_name=args.model,
        temperature=args.temperature,
        on_unparseable=args.on_unparseable,
        cache_path=args.cache,
        truth_path=args.truth,
    )
    try:
        result = analyze_notebook(
            document,
            notebook_id=path.stem,
            mode=args.mode,
            config=config,
            track_imports=args.track_imports,
        )
    except (ResolverError, CacheMissError):
        raise
    except CrabsError as exc:
        return path_str, str(exc)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{path.stem}.graph.json"
    out_path.write_text(dump_json(result_to_dict(result)), encoding="utf-8")
    print(f"{path_str}: {len(result.flow_graph.flows)} flows, {len(result.dependency_graph.deps)} deps -> {out_path}")
    return path_str, None


def _cmd_analyze(args) -> int:
    if args.mode == "resolved" and not args.resolver:
        print("crabs analyze: error: --mode resolved requires --resolver", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.jobs > 1 and len(args.notebooks) > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                outcomes = list(pool.map(lambda p: _analyze_one(p, args), args.notebooks))
        else:
            outcomes = [_analyze_one(p, args) for p in args.notebooks]
    except (ResolverError, CacheMissError) as exc:
        print(f"crabs analyze: resolver failure: {exc}", file=sys.stderr)
        return EXIT_RESOLVER_FAILURE
    failures = [(path, err) for path, err in outcomes if err]
    for path, err in failures:
        print(f"crabs analyze: {path}: {err}", file=sys.stderr)
    return EXIT_ANALYSIS_FAILURES if failures else EXIT_OK


def _format_row(nid: str, score) -> str:
    return (
        f"{nid:<28} "
        f"{score.flow.precision:7.2%} {score.flow.recall:7.2%} {score.flow.f1:7.2%} "
        f"{str(score.em_flow):>5} "
        f"{score.dep.precision:7.2%} {score.dep.recall:7.2%} {score.dep.f1:7.2%} "
        f"{str(score.em_dep):>5}"
    )


def _cmd_eval(args) -> int:
    pred_dir = Path(args.pred)
    truth_dir = Path(args.truth)
    truths = {}
    for path in sorted(truth_dir.glob("*.json")):
        try:
            truth = load_ground_truth(path)
        except CrabsError:
            continue
        truths[truth.notebook_id] = truth

    scores = []
    missing = []
    for path in sorted(pred_dir.glob("*.graph.json")):
        loaded = load_graph_json(path)
        truth = truths.get(loaded.notebook_id)
        if truth is None:
            missing.append(loaded.notebook_id)
            continue
        scores.append(score_notebook(loaded.flow_graph, truth))

    for nid in missing:
        print(f"crabs eval: no ground truth for notebook {nid!r}", file=sys.stderr)
    if not scores:
        print("crabs eval: nothing to score", file=sys.stderr)
        return EXIT_USAGE

    report = aggregate(scores, incomplete=bool(missing))

    header = (
        f"{'notebook':<28} {'fP':>7} {'fR':>7} {'fF1':>7} {'fEM':>5} "
        f"{'dP':>7} {'dR':>7} {'dF1':>7} {'dEM':>5}"
    )
    print(header)
    print("-" * len(header))
    for nid in sorted(report.per_notebook):
        print(_format_row(nid, report.per_notebook[nid]))
    print("-" * len(header))
    agg_f, agg_d = report.aggregate_flow, report.aggregate_dep
    print(
        f"{'aggregate':<28} "
        f"{agg_f['precision']:7.2%} {agg_f['recall']:7.2%} {agg_f['f1']:7.2%} "
        f"{report.em_rate_flow:5.0%} "
        f"{agg_d['precision']:7.2%} {agg_d['recall']:7.2%} {agg_d['f1']:7.2%} "
        f"{report.em_rate_dep:5.0%}"
    )

    if args.out:
        Path(args.out).write_text(dump_json(report.as_dict()), encoding="utf-8")
        print(f"metrics -> {args.out}")
    return EXIT_ANALYSIS_FAILURES if missing else EXIT_OK


def _cmd_export(args) -> int:
    loaded = load_graph_json(Path(args.graph))
    if args.format == "dot":
        text = to_dot(loaded, view=args.view)
    else:
        text = dump_json(loaded.raw)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "export":
            return _cmd_export(args)
    except CrabsError as exc:
        print(f"crabs {args.command}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_FAILURES
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":
    raise SystemExit(main())
