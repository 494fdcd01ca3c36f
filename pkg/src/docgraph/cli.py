"""Command-line entry point: index, search, and evaluate subcommands.

Runs are reproducible: identical inputs and flags produce byte-identical
index artifacts and run files. Exit codes: 0 success, 1 input error,
2 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .bm25 import bm25_rerank, bm25_retrieve
from .config import RankingConfig, load_config
from .errors import DocGraphError, InconsistencyError, InputError
from .evaluation import METRIC_KEYS, MetricReport, Run, evaluate, load_qrels
from .matcher import MatchResult, retrieve
from .ontology import Ontology, expand_query_upwards, load_ontology
from .query import (
    DisjunctiveQuery,
    compile_keyword_topic,
    compile_freetext_topic,
    compile_topic,
    parse_topics_file,
    query_translation_score,
    translate_term_query,
)
from .ranker import (
    DEFAULT_CUTOFF,
    RankedDocument,
    ScoredDocument,
    assemble_final_ranking,
    graph_rank,
)
from .storage import LoadedIndex, load_index, save_index
from .vocabulary import CONCEPT_TYPES, Vocabulary, load_vocabulary
from .corpus import ingest_documents

RANKERS = ("graphrank", "bm25-rerank", "bm25-native", "none")
PARALLELISM_ENV = "DOCGRAPH_PARALLELISM"


class _Parser(argparse.ArgumentParser):
    # Usage errors are input errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class _Context:
    loaded: LoadedIndex
    vocabulary: Vocabulary
    ontology: Ontology | None
    config: RankingConfig
    scope: frozenset[str] | None


def _load_scope(path: str | None) -> frozenset[str] | None:
    if path is None:
        return None
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read scope file {path}: {exc}") from exc
    return frozenset(line.strip() for line in lines if line.strip())


def _load_context(args) -> _Context:
    loaded = load_index(args.index)
    vocabulary = load_vocabulary(args.vocab)
    ontology = load_ontology(args.ontology) if args.ontology else None
    config = load_config(args.config) if args.config else RankingConfig()
    if getattr(args, "expand_ontology", False) and ontology is None:
        raise InputError("--expand-ontology requires --ontology")
    return _Context(loaded, vocabulary, ontology, config, _load_scope(args.scope))


def _mode_tag(match_mode: str, expand: bool, ranker: str) -> str:
    if ranker == "bm25-native":
        return "bm25-native"
    parts = [match_mode]
    if expand:
        parts.append("ontology")
    if ranker != "none":
        parts.append(ranker)
    return "-".join(parts)


def _mode_name(match_mode: str, expand: bool, ranker: str) -> str:
    if ranker == "bm25-native":
        return "Native BM25 (Baseline)"
    name = "Full Match" if match_mode == "full" else "Partial Match"
    if expand:
        name += " + Ontology"
    if ranker == "graphrank":
        name += " + GraphRank"
    elif ranker == "bm25-rerank":
        name += " + BM25"
    return name


def _rank_match_result(
    query: DisjunctiveQuery,
    result: MatchResult,
    ctx: _Context,
    match_mode: str,
    ranker: str,
    cutoff: int,
) -> list[RankedDocument]:
    """Turn one retrieval result into a final ranking for one ranker mode."""
    corpus = ctx.loaded.corpus
    include_partial = match_mode == "partial"

    if ranker == "graphrank":
        full = graph_rank(
            query, result.full, corpus, ctx.config.taxonomy, ctx.config.weights, "full"
        )
        partial = (
            graph_rank(
                query,
                result.partial,
                corpus,
                ctx.config.taxonomy,
                ctx.config.weights,
                "partial",
            )
            if include_partial
            else []
        )
    elif ranker == "bm25-rerank":
        def rerank(doc_fragments, match_class):
            scored = bm25_rerank(
                query.text,
                doc_fragments.keys(),
                ctx.loaded.text_index,
                ctx.config.bm25,
            )
            return [
                ScoredDocument(doc_id, score, match_class, doc_fragments[doc_id][0])
                for doc_id, score in scored
            ]

        full = rerank(result.full, "full")
        partial = rerank(result.partial, "partial") if include_partial else []
    elif ranker == "none":
        def by_id_desc(doc_fragments, match_class):
            # The pre-ranking system's order: doc ids (a date proxy) descending.
            ordered = sorted(doc_fragments, reverse=True)
            return [
                ScoredDocument(doc_id, 1.0 / (i + 1), match_class, doc_fragments[doc_id][0])
                for i, doc_id in enumerate(ordered)
            ]

        full = by_id_desc(result.full, "full")
        partial = by_id_desc(result.partial, "partial") if include_partial else []
    else:
        raise InputError(f"unknown ranker {ranker!r}")
    return assemble_final_ranking(full, partial, cutoff=cutoff)


def _rank_native(
    query: DisjunctiveQuery, ctx: _Context, cutoff: int
) -> list[RankedDocument]:
    hits = bm25_retrieve(
        query.text, cutoff, ctx.loaded.text_index, ctx.config.bm25, ctx.scope
    )
    return [
        RankedDocument(
            rank=i + 1,
            doc_id=doc_id,
            run_score=score,
            model_score=score,
            match_class="native",
            best_fragment=None,
        )
        for i, (doc_id, score) in enumerate(hits)
    ]


def cmd_index(args) -> int:
    corpus = ingest_documents(args.corpus)
    load_vocabulary(args.vocab)
    if args.config:
        load_config(args.config)
    if args.ontology:
        load_ontology(args.ontology)
    manifest_path = save_index(args.out, corpus)
    print(f"indexed {corpus.doc_count} documents -> {manifest_path.parent}")
    return 0


def _parse_search_query(args, ctx: _Context) -> DisjunctiveQuery:
    given = [bool(args.triple), args.keywords is not None, args.freetext is not None]
    if sum(given) != 1:
        raise InputError("provide exactly one of --triple/--keywords/--freetext")
    if args.triple:
        triples = []
        for raw in args.triple:
            parts = [p.strip() for p in raw.split("|")]
            if len(parts) != 3:
                raise InputError(
                    f"--triple expects 'subject|predicate|object', got {raw!r}"
                )
            subject, predicate, obj = parts
            triples.append((subject, None if predicate in ("?", "") else predicate, obj))
        return translate_term_query(triples, ctx.vocabulary, ctx.ontology)
    if args.keywords is not None:
        components = []
        for raw in args.keywords.split("|"):
            raw = raw.strip()
            if not raw:
                raise InputError("empty component in --keywords")
            term, _, concept_type = raw.rpartition(":")
            if term and concept_type in CONCEPT_TYPES:
                components.append((term.strip(), concept_type))
            else:
                components.append((raw, None))
        return compile_keyword_topic(components, ctx.vocabulary)
    return compile_freetext_topic(args.freetext, ctx.vocabulary)


def _format_fragment(fragment) -> str:
    if fragment is None or not fragment.edges:
        return ""
    return "; ".join(f"({s}) -[{p}]-> ({o})" for s, p, o in fragment.edges)


def cmd_search(args) -> int:
    ctx = _load_context(args)
    query = _parse_search_query(args, ctx)
    if args.expand_ontology:
        query = expand_query_upwards(query, ctx.ontology)

    if args.ranker == "bm25-native":
        ranked = _rank_native(query, ctx, args.cutoff)
    else:
        result = retrieve(query, ctx.loaded.statement_index, ctx.loaded.corpus, ctx.scope)
        ranked = _rank_match_result(query, result, ctx, args.match, args.ranker, args.cutoff)

    tag = args.tag or _mode_tag(args.match, args.expand_ontology, args.ranker)
    print(f"# {len(ranked)} hits (translation score {query_translation_score(query):.4f})")
    for entry in ranked:
        line = f"{entry.rank:4d}. {entry.doc_id}  score={entry.model_score:.6f}  [{entry.match_class}]"
        explanation = _format_fragment(entry.best_fragment)
        print(line)
        if explanation:
            print(f"      {explanation}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        run = Run(tag)
        run.add_topic("0", [(e.doc_id, e.run_score) for e in ranked])
        run_path = out_dir / f"run-{tag}.txt"
        run.write(run_path)
        print(f"# run written to {run_path}")
    return 0


def cmd_evaluate(args) -> int:
    ctx = _load_context(args)
    topics = parse_topics_file(args.topics)
    qrels = load_qrels(args.qrels)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    match_modes = list(dict.fromkeys(args.match or ["full", "partial"]))
    rankers = list(dict.fromkeys(args.ranker or ["graphrank"]))
    expand = args.expand_ontology
    modes: list[tuple[str, str]] = []
    for match_mode in match_modes:
        for ranker in rankers:
            if ranker != "bm25-native":
                modes.append((match_mode, ranker))
    if "bm25-native" in rankers:
        modes.append(("-", "bm25-native"))

    needs_graph = any(ranker != "bm25-native" for _, ranker in modes)

    def process(topic):
        try:
            query = compile_topic(topic, ctx.vocabulary)
        except InputError as exc:
            return topic.topic_id, None, None, str(exc)
        translation = query_translation_score(query)
        if expand:
            query = expand_query_upwards(query, ctx.ontology)
        result = (
            retrieve(query, ctx.loaded.statement_index, ctx.loaded.corpus, ctx.scope)
            if needs_graph
            else None
        )
        rankings = {}
        for match_mode, ranker in modes:
            if ranker == "bm25-native":
                ranked = _rank_native(query, ctx, args.cutoff)
            else:
                ranked = _rank_match_result(
                    query, result, ctx, match_mode, ranker, args.cutoff
                )
            rankings[(match_mode, ranker)] = [
                (entry.doc_id, entry.run_score) for entry in ranked
            ]
        return topic.topic_id, translation, rankings, None

    degree = max(1, int(os.environ.get(PARALLELISM_ENV, "1")))
    if degree > 1:
        with ThreadPoolExecutor(max_workers=degree) as pool:
            outcomes = list(pool.map(process, topics))
    else:
        outcomes = [process(topic) for topic in topics]

    excluded = [
        (topic_id, reason) for topic_id, _, _, reason in outcomes if reason is not None
    ]
    translation_scores = {
        topic_id: translation
        for topic_id, translation, _, reason in outcomes
        if reason is None
    }

    reports: dict[str, MetricReport] = {}
    mode_names: dict[str, str] = {}
    payload: dict = {"modes": {}}
    for match_mode, ranker in modes:
        tag = _mode_tag(match_mode, expand, ranker)
        run = Run(tag)
        for topic_id, _, rankings, reason in outcomes:
            if reason is not None:
                continue
            run.add_topic(topic_id, rankings[(match_mode, ranker)])
        run.write(out_dir / f"run-{tag}.txt")
        report = evaluate(run, qrels, excluded=excluded)
        reports[tag] = report
        mode_names[tag] = _mode_name(match_mode, expand, ranker)
        payload["modes"][tag] = {
            "name": mode_names[tag],
            "means": report.means,
            "per_topic": {
                topic_id: {
                    "metrics": dict(tm.metrics),
                    "judged": tm.judged,
                    "unjudged": tm.unjudged,
                }
                for topic_id, tm in report.per_topic.items()
            },
            "skipped_topics": list(report.skipped_topics),
            "excluded_topics": [list(item) for item in report.excluded_topics],
        }
    payload["translation_scores"] = translation_scores
    (out_dir / "metrics.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

    labels = {
        "recall@1000": "Recall@1000",
        "ndcg@10": "nDCG@10",
        "ndcg@20": "nDCG@20",
        "ndcg@100": "nDCG@100",
        "p@10": "P@10",
        "p@20": "P@20",
        "p@100": "P@100",
    }
    header = ["Mode".ljust(42)] + [labels[key].rjust(12) for key in METRIC_KEYS]
    print("".join(header))
    for tag, report in reports.items():
        cells = [mode_names[tag].ljust(42)]
        for key in METRIC_KEYS:
            value = report.means.get(key)
            cells.append(("-" if value is None else f"{value:.4f}").rjust(12))
        print("".join(cells))
    if excluded:
        print(f"# {len(excluded)} topic(s) excluded by translation failure:")
        for topic_id, reason in excluded:
            print(f"#   {topic_id}: {reason}")
    skipped = {tag: report.skipped_topics for tag, report in reports.items()}
    for tag, topics_skipped in skipped.items():
        for topic_id in topics_skipped:
            print(f"# warning: topic {topic_id} ({tag}) has no qrels; skipped")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="docgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    index = sub.add_parser("index", help="ingest a corpus and persist indexes")
    index.add_argument("--corpus", required=True, help="line-delimited JSON corpus file")
    index.add_argument("--vocab", required=True, help="vocabulary TSV (validated)")
    index.add_argument("--ontology", help="ontology TSV (validated if given)")
    index.add_argument("--config", help="ranking configuration file (validated)")
    index.add_argument("--out", required=True, help="index directory to write")
    index.set_defaults(func=cmd_index)

    def common_search_flags(p):
        p.add_argument("--index", required=True, help="index directory from 'index'")
        p.add_argument("--vocab", required=True, help="vocabulary TSV")
        p.add_argument("--ontology", help="ontology TSV")
        p.add_argument("--config", help="ranking configuration file")
        p.add_argument("--scope", help="doc-id allowlist, one id per line")
        p.add_argument("--expand-ontology", action="store_true", help="rewrite queries upwards")
        p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)

    search = sub.add_parser("search", help="run one query against an index")
    common_search_flags(search)
    search.add_argument(
        "--match", choices=("full", "partial"), default="full",
        help="'partial' appends partially matching documents after full matches",
    )
    search.add_argument("--ranker", choices=RANKERS, default="graphrank")
    search.add_argument(
        "--triple", action="append", default=[],
        help="fact pattern 'subject|predicate|object' ('?' = any predicate); repeatable",
    )
    search.add_argument("--keywords", help="keyword components 'a | b:type | c'")
    search.add_argument("--freetext", help="free-text query string")
    search.add_argument("--out", help="directory for the run file")
    search.add_argument("--tag", help="run tag (defaults to the mode tag)")
    search.set_defaults(func=cmd_search)

    ev = sub.add_parser("evaluate", help="run topics against qrels over a mode matrix")
    common_search_flags(ev)
    ev.add_argument(
        "--match", action="append", choices=("full", "partial"),
        help="match mode(s) to evaluate; repeatable (default: both)",
    )
    ev.add_argument(
        "--ranker", action="append", choices=RANKERS,
        help="ranker(s) to evaluate; repeatable (default: graphrank)",
    )
    ev.add_argument("--topics", required=True, help="topics file")
    ev.add_argument("--qrels", required=True, help="qrels file")
    ev.add_argument("--out", required=True, help="output directory for runs and metrics")
    ev.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InconsistencyError as exc:
        print(f"docgraph: internal inconsistency: {exc}", file=sys.stderr)
        return 2
    except DocGraphError as exc:
        print(f"docgraph: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
