"""Statement indexing, fragment enumeration, and Full/Partial retrieval.

A fragment is one binding of a query's fact patterns to concrete document
edges. Fragment identity is the bound edge tuple in pattern order; the first
binding found in deterministic order (patterns in order, candidate edges
lexicographic, forward orientation before reverse) supplies the node
witnesses. Candidate documents come from posting-list intersections over the
pair index, then each candidate is verified by full enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .corpus import Corpus, DocumentGraph, Edge
from .query import DisjunctiveQuery, FactPattern, NarrativeQuery

# Enumeration stops after this many distinct fragments for one document.
FRAGMENT_CAP = 1024


@dataclass(frozen=True)
class Fragment:
    """A document subgraph bound to the query.

    ``edges`` follows pattern order (empty for containment matches);
    ``node_bindings`` maps query node ids to the bound concept ids.
    """

    doc_id: str
    edges: tuple[Edge, ...]
    node_bindings: tuple[tuple[str, str], ...]

    @property
    def node_map(self) -> dict[str, str]:
        return dict(self.node_bindings)

    @property
    def bound_concepts(self) -> tuple[str, ...]:
        """Distinct bound concept ids, in node-binding order."""
        return tuple(dict.fromkeys(concept for _, concept in self.node_bindings))

    def edge_key(self) -> frozenset[Edge]:
        return frozenset(self.edges)


class FragmentList(list):
    """List of fragments with a truncation flag from the enumeration cap."""

    def __init__(self, items: Iterable[Fragment] = (), truncated: bool = False):
        super().__init__(items)
        self.truncated = truncated


class StatementIndex:
    """Inverted indexes over all document graphs of a corpus.

    - triple: (s, p, o) -> doc ids containing that exact edge
    - pair: unordered {a, b} -> (doc id, directed edge) entries
    - concept_docs: concept id -> doc ids mentioning it
    """

    __slots__ = ("triple", "pair", "concept_docs")

    def __init__(
        self,
        triple: Mapping[Edge, frozenset[str]],
        pair: Mapping[frozenset[str], tuple[tuple[str, Edge], ...]],
        concept_docs: Mapping[str, frozenset[str]],
    ):
        self.triple = dict(triple)
        self.pair = dict(pair)
        self.concept_docs = dict(concept_docs)


def build_statement_index(corpus: Corpus) -> StatementIndex:
    triple: dict[Edge, set[str]] = {}
    pair: dict[frozenset[str], list[tuple[str, Edge]]] = {}
    concept_docs: dict[str, set[str]] = {}
    for doc_id in corpus.doc_ids:
        for edge in corpus.graph(doc_id).sorted_edges:
            subject, _, obj = edge
            triple.setdefault(edge, set()).add(doc_id)
            pair.setdefault(frozenset((subject, obj)), []).append((doc_id, edge))
        for concept in corpus.document(doc_id).concept_counts:
            concept_docs.setdefault(concept, set()).add(doc_id)
    return StatementIndex(
        triple={edge: frozenset(docs) for edge, docs in triple.items()},
        pair={key: tuple(sorted(entries)) for key, entries in pair.items()},
        concept_docs={c: frozenset(docs) for c, docs in concept_docs.items()},
    )


def _pattern_orientations(
    pattern: FactPattern, edge: Edge
) -> Iterator[tuple[str, str]]:
    """(subject concept, object concept) bindings of an edge to a pattern.

    Forward comes before reverse; reverse exists only for wildcard slots.
    """
    subject, predicate, obj = edge
    if pattern.predicate.is_wildcard:
        if subject in pattern.subject and obj in pattern.object:
            yield subject, obj
        if obj in pattern.subject and subject in pattern.object:
            yield obj, subject
    elif predicate in pattern.predicate.labels:
        if subject in pattern.subject and obj in pattern.object:
            yield subject, obj


def matches(
    query: NarrativeQuery, graph: DocumentGraph, cap: int | None = FRAGMENT_CAP
) -> FragmentList:
    """All distinct bindings of the query's patterns to the document graph.

    Distinctness is by the bound edge tuple; concept sets shared by several
    patterns must bind to the same concept everywhere. Enumeration order is
    deterministic and truncates at ``cap`` fragments.
    """
    patterns = query.patterns
    options: list[list[tuple[Edge, str, str]]] = []
    for pattern in patterns:
        if pattern.subject.node_id == pattern.object.node_id:
            # A self-loop pattern cannot bind: document edges never loop.
            return FragmentList()
        opts = [
            (edge, s_concept, o_concept)
            for edge in graph.sorted_edges
            for s_concept, o_concept in _pattern_orientations(pattern, edge)
        ]
        if not opts:
            return FragmentList()
        options.append(opts)

    result = FragmentList()
    seen: set[tuple[Edge, ...]] = set()
    bound: dict[str, str] = {}
    chosen: list[Edge] = []

    def backtrack(i: int) -> None:
        if result.truncated:
            return
        if i == len(patterns):
            key = tuple(chosen)
            if key in seen:
                return
            if cap is not None and len(result) >= cap:
                result.truncated = True
                return
            seen.add(key)
            result.append(
                Fragment(
                    doc_id=graph.doc_id,
                    edges=key,
                    node_bindings=tuple(sorted(bound.items())),
                )
            )
            return
        subject_node = patterns[i].subject.node_id
        object_node = patterns[i].object.node_id
        for edge, s_concept, o_concept in options[i]:
            if bound.get(subject_node, s_concept) != s_concept:
                continue
            if bound.get(object_node, o_concept) != o_concept:
                continue
            added = []
            if subject_node not in bound:
                bound[subject_node] = s_concept
                added.append(subject_node)
            if object_node not in bound:
                bound[object_node] = o_concept
                added.append(object_node)
            chosen.append(edge)
            backtrack(i + 1)
            chosen.pop()
            for node in added:
                del bound[node]

    backtrack(0)
    return result


@dataclass
class MatchResult:
    """Documents matching fully or partially, with their fragments.

    The two doc-id sets are disjoint: a document matching the whole query is
    removed from the partial class. Partial fragments bind single patterns.
    """

    full: dict[str, list[Fragment]]
    partial: dict[str, list[Fragment]]
    truncated_docs: frozenset[str] = field(default_factory=frozenset)

    @property
    def full_doc_ids(self) -> tuple[str, ...]:
        return tuple(self.full)

    @property
    def partial_doc_ids(self) -> tuple[str, ...]:
        return tuple(self.partial)


def _fragment_min_node_score(fragment: Fragment, query: DisjunctiveQuery) -> float:
    return min(
        query.node_score(node, concept) for node, concept in fragment.node_bindings
    )


def _pattern_candidate_docs(pattern: FactPattern, index: StatementIndex) -> set[str]:
    docs: set[str] = set()
    subjects = pattern.subject.concept_ids()
    objects = pattern.object.concept_ids()
    if pattern.predicate.is_wildcard:
        for s in subjects:
            for o in objects:
                if s == o:
                    continue
                for doc_id, _ in index.pair.get(frozenset((s, o)), ()):
                    docs.add(doc_id)
    else:
        for s in subjects:
            for o in objects:
                if s == o:
                    continue
                for p in pattern.predicate.labels:
                    docs.update(index.triple.get((s, p, o), ()))
    return docs


def _single_pattern_fragments(
    pattern: FactPattern, index: StatementIndex
) -> Iterator[tuple[str, Fragment]]:
    """Deterministic stream of one-pattern matches straight off the indexes."""
    subject_node = pattern.subject.node_id
    object_node = pattern.object.node_id
    if subject_node == object_node:
        return
    subjects = sorted(pattern.subject.concept_ids())
    objects = sorted(pattern.object.concept_ids())
    if pattern.predicate.is_wildcard:
        seen_pairs = set()
        for s in subjects:
            for o in objects:
                if s == o:
                    continue
                key = frozenset((s, o))
                if key in seen_pairs:
                    continue
                seen_pairs.add(key)
                for doc_id, edge in index.pair.get(key, ()):
                    for s_concept, o_concept in _pattern_orientations(pattern, edge):
                        yield doc_id, Fragment(
                            doc_id,
                            (edge,),
                            tuple(
                                sorted(
                                    {subject_node: s_concept, object_node: o_concept}.items()
                                )
                            ),
                        )
                        break  # forward orientation wins
    else:
        for s in subjects:
            for o in objects:
                if s == o:
                    continue
                for p in sorted(pattern.predicate.labels):
                    edge = (s, p, o)
                    for doc_id in sorted(index.triple.get(edge, ())):
                        yield doc_id, Fragment(
                            doc_id,
                            (edge,),
                            tuple(sorted({subject_node: s, object_node: o}.items())),
                        )


def retrieve(
    query: DisjunctiveQuery,
    index: StatementIndex,
    corpus: Corpus,
    scope: frozenset[str] | set[str] | None = None,
) -> MatchResult:
    """Match a disjunctive query against the corpus.

    Full matches satisfy at least one alternative completely; partial matches
    satisfy at least one individual fact pattern but no alternative. Fragments
    are pooled over alternatives and deduplicated by edge set, keeping the
    best-translated binding. ``scope`` restricts candidate documents.
    """

    def in_scope(doc_id: str) -> bool:
        return scope is None or doc_id in scope

    if query.is_containment:
        concept_set = query.components[0]
        candidates: set[str] = set()
        for concept in concept_set.concept_ids():
            candidates.update(index.concept_docs.get(concept, ()))
        full: dict[str, list[Fragment]] = {}
        for doc_id in sorted(candidates):
            if not in_scope(doc_id):
                continue
            mentioned = corpus.document(doc_id).concept_counts
            fragments = [
                Fragment(doc_id, (), ((concept_set.node_id, concept),))
                for concept in sorted(set(concept_set.concept_ids()) & mentioned.keys())
            ]
            if fragments:
                full[doc_id] = fragments
        return MatchResult(full=full, partial={})

    truncated: set[str] = set()
    full_buckets: dict[str, dict[frozenset[Edge], Fragment]] = {}
    for alternative in query.alternatives:
        candidates: set[str] | None = None
        for pattern in alternative.patterns:
            docs = _pattern_candidate_docs(pattern, index)
            candidates = docs if candidates is None else candidates & docs
            if not candidates:
                break
        if not candidates:
            continue
        for doc_id in sorted(candidates):
            if not in_scope(doc_id):
                continue
            fragments = matches(alternative, corpus.graph(doc_id))
            if fragments.truncated:
                truncated.add(doc_id)
            if not fragments:
                continue
            bucket = full_buckets.setdefault(doc_id, {})
            for fragment in fragments:
                key = fragment.edge_key()
                current = bucket.get(key)
                if current is None:
                    if len(bucket) >= FRAGMENT_CAP:
                        truncated.add(doc_id)
                        continue
                    bucket[key] = fragment
                elif _fragment_min_node_score(fragment, query) > _fragment_min_node_score(
                    current, query
                ):
                    bucket[key] = fragment

    partial_buckets: dict[str, dict[frozenset[Edge], Fragment]] = {}
    for pattern in query.distinct_patterns():
        for doc_id, fragment in _single_pattern_fragments(pattern, index):
            if doc_id in full_buckets or not in_scope(doc_id):
                continue
            bucket = partial_buckets.setdefault(doc_id, {})
            key = fragment.edge_key()
            current = bucket.get(key)
            if current is None:
                if len(bucket) >= FRAGMENT_CAP:
                    truncated.add(doc_id)
                    continue
                bucket[key] = fragment
            elif _fragment_min_node_score(fragment, query) > _fragment_min_node_score(
                current, query
            ):
                bucket[key] = fragment

    return MatchResult(
        full={doc_id: list(bucket.values()) for doc_id, bucket in sorted(full_buckets.items())},
        partial={
            doc_id: list(bucket.values()) for doc_id, bucket in sorted(partial_buckets.items())
        },
        truncated_docs=frozenset(truncated),
    )
