"""Command-line front end: score pairs, evaluate corpora, inspect
instructions, and summarize corpus statistics.

Exit codes: 0 success, 1 evaluation-domain error (bad file, bad config,
missing id), 2 usage error, 3 embedding backend unavailable.
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
from collections import Counter
from typing import Any, Sequence

from .corpus import CorpusError, emit_report, evaluate_corpus, load_corpus, load_predictions
from .directional import ConflictPairSet
from .instructions import DirectionLexicon, extract_actions, normalize
from .scoring import (
    ConfigError,
    MetricConfig,
    RuntimeSettings,
    build_config,
    enhanced_score,
    load_config_file,
)
from .similarity import BackendError, EmbeddingBackend, lexical_backend, remote_backend

_CONFIG_FLAG_DESTS = (
    "alpha",
    "beta",
    "gamma",
    "w",
    "order_threshold",
    "step_penalty_rate",
    "boost_factor",
    "special_case_boost",
    "conflict_policy",
    "lexicon_path",
    "conflict_pairs_path",
    "backend",
    "endpoint",
    "timeout_ms",
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("configuration")
    group.add_argument("--config", help="TOML config file (or set NAVSCORE_CONFIG)")
    group.add_argument("--alpha", type=float, help="weight of directional similarity")
    group.add_argument("--beta", type=float, help="weight of flow bonus")
    group.add_argument("--gamma", type=float, help="weight of semantic similarity")
    group.add_argument("--w", type=float, help="mix of enhanced score into final score")
    group.add_argument("--order-threshold", dest="order_threshold", type=float,
                       help="order similarity below this is a critical mismatch")
    group.add_argument("--step-penalty-rate", dest="step_penalty_rate", type=float,
                       help="penalty per relative step-count difference")
    group.add_argument("--boost-factor", dest="boost_factor", type=float,
                       help="weight multiplier for direction-bearing tokens")
    group.add_argument("--special-case-boost", dest="special_case_boost", type=float,
                       help="bonus for same-route paraphrases")
    group.add_argument("--conflict-policy", dest="conflict_policy",
                       help="'zero' or 'penalize(f)'")
    group.add_argument("--lexicon", dest="lexicon_path", help="direction lexicon TSV")
    group.add_argument("--conflict-pairs", dest="conflict_pairs_path",
                       help="opposing-direction pairs TSV")
    group.add_argument("--backend", choices=("lexical", "remote"),
                       help="embedding backend (default lexical)")
    group.add_argument("--endpoint", help="embedding service URL for --backend remote")
    group.add_argument("--timeout-ms", dest="timeout_ms", type=int,
                       help="embedding service timeout in milliseconds")


def _resolve(args: argparse.Namespace) -> tuple[MetricConfig, RuntimeSettings]:
    config_path = getattr(args, "config", None) or os.environ.get("NAVSCORE_CONFIG")
    file_values = load_config_file(config_path) if config_path else {}
    overrides = {name: getattr(args, name, None) for name in _CONFIG_FLAG_DESTS}
    return build_config(file_values, overrides)


def _make_backend(runtime: RuntimeSettings) -> EmbeddingBackend:
    if runtime.backend == "remote":
        return remote_backend(runtime.endpoint, timeout=runtime.timeout_ms / 1000.0)
    return lexical_backend()


def _make_lexicon(runtime: RuntimeSettings) -> DirectionLexicon:
    if runtime.lexicon_path:
        return DirectionLexicon.from_file(runtime.lexicon_path)
    return DirectionLexicon.default()


def _make_pairs(runtime: RuntimeSettings) -> ConflictPairSet:
    if runtime.conflict_pairs_path:
        return ConflictPairSet.from_file(runtime.conflict_pairs_path)
    return ConflictPairSet.default()


def _format_value(value: Any, decimals: int = 3) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{decimals}f}"
    return str(value)


def cmd_score(args: argparse.Namespace) -> int:
    cfg, runtime = _resolve(args)
    backend = _make_backend(runtime)
    breakdown = enhanced_score(
        args.ref, args.pred, backend, cfg, _make_lexicon(runtime), _make_pairs(runtime)
    )
    if args.json:
        print(json.dumps(breakdown.to_dict(include_config=True), indent=2, ensure_ascii=False))
    else:
        for name, value in breakdown.to_dict().items():
            print(f"{name} {_format_value(value)}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg, runtime = _resolve(args)
    backend = _make_backend(runtime)
    corpus = load_corpus(args.corpus)
    predictions = load_predictions(args.predictions)
    report = evaluate_corpus(
        corpus,
        predictions,
        backend,
        _make_lexicon(runtime),
        _make_pairs(runtime),
        cfg,
        strictness="strict" if args.strict else "skip_missing",
        jobs=args.jobs,
        with_timestamp=not args.no_timestamp,
    )
    emit_report(report, args.format, args.out)
    if report.aggregates is None:
        print("scored 0 records")
    else:
        means = " | ".join(
            f"mean {name} {report.aggregates[name]['mean']:.4f}"
            for name in ("final_score", "enhanced_score", "bert_f1")
        )
        print(f"scored {report.counts['records']} records | {means}")
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    lexicon = (
        DirectionLexicon.from_file(args.lexicon) if args.lexicon else DirectionLexicon.default()
    )
    instruction = normalize(args.text)
    actions = extract_actions(instruction, lexicon)
    print(f"text: {instruction.raw}")
    print(f"tokens: {' '.join(instruction.tokens)}")
    print(f"directions: [{', '.join(str(a.direction) for a in actions)}]")
    for action in actions:
        print(f"  {action.direction} index={action.token_index} surface={action.surface!r}")
    return 0


def _print_histogram(label: str, values: Sequence[int]) -> None:
    print(
        f"{label}: min {min(values)} median {statistics.median(values)} max {max(values)}"
    )
    for value, count in sorted(Counter(values).items()):
        print(f"  {value}: {count}")


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    print(f"records {len(corpus)}")
    if not corpus:
        return 0
    lexicon = DirectionLexicon.default()
    query_lengths = [len(normalize(r.query).tokens) for r in corpus]
    answer_lengths = [len(normalize(r.answer).tokens) for r in corpus]
    action_counts = [len(extract_actions(normalize(r.answer), lexicon)) for r in corpus]
    _print_histogram("query words", query_lengths)
    _print_histogram("answer words", answer_lengths)
    _print_histogram("answer directional actions", action_counts)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="navscore",
        description="Directional-aware scoring of navigation instructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p_score = sub.add_parser("score", help="score one prediction against one reference")
    p_score.add_argument("--ref", required=True, help="reference instruction")
    p_score.add_argument("--pred", required=True, help="predicted instruction")
    p_score.add_argument("--json", action="store_true", help="emit the breakdown as JSON")
    _add_config_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    p_eval = sub.add_parser("evaluate", help="score a prediction file against a corpus")
    p_eval.add_argument("--corpus", required=True, help="corpus JSON file")
    p_eval.add_argument("--predictions", required=True, help="predictions JSON/JSON-lines file")
    p_eval.add_argument("--out", required=True, help="report output path")
    p_eval.add_argument("--format", choices=("json", "csv"), default="json",
                        help="report format (default json)")
    p_eval.add_argument("--strict", action="store_true",
                        help="fail when corpus and prediction ids differ")
    p_eval.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="concurrent scoring jobs (default: processor count)")
    p_eval.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp for byte-reproducible reports")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_inspect = sub.add_parser("inspect", help="show tokens and extracted actions for a text")
    p_inspect.add_argument("--text", required=True, help="instruction text")
    p_inspect.add_argument("--lexicon", help="direction lexicon TSV")
    p_inspect.set_defaults(func=cmd_inspect)

    p_stats = sub.add_parser("stats", help="summarize a corpus")
    p_stats.add_argument("--corpus", required=True, help="corpus JSON file")
    p_stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CorpusError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
