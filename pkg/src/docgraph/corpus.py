"""Corpus ingestion, per-document statement graphs, and concept statistics.

Documents arrive pre-annotated: concept mentions with character offsets and
(subject, predicate, object) statement extractions with confidence scores.
The upstream NLP pipeline that produces these annotations is not part of this
package. After construction a :class:`Corpus` and everything hanging off it
(documents, graphs, stats) is immutable and safe for concurrent readers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import AbsentConceptError, CorpusFormatError

# A directed labeled edge of a document graph.
Edge = tuple[str, str, str]


@dataclass(frozen=True)
class ConceptMention:
    """One occurrence of a concept in a document's text."""

    concept_id: str
    start: int
    end: int


@dataclass(frozen=True)
class StatementExtraction:
    """One extracted statement with its extraction confidence."""

    subject: str
    predicate: str
    object: str
    confidence: float
    sentence_index: int

    @property
    def edge(self) -> Edge:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class EdgeRecord:
    """Aggregate over all extractions supporting one distinct edge."""

    max_confidence: float
    support_count: int


class Document:
    """A validated, immutable pre-annotated document.

    Offsets are 0-based character positions with exclusive ends. The token
    list is only consumed by the BM25 baseline; graph scoring works entirely
    off mentions and extractions.
    """

    __slots__ = (
        "doc_id",
        "text_length",
        "tokens",
        "mentions",
        "extractions",
        "concept_counts",
        "max_concept_count",
        "_mention_span",
    )

    def __init__(
        self,
        doc_id: str,
        text_length: int,
        tokens: Iterable[str],
        mentions: Iterable[ConceptMention],
        extractions: Iterable[StatementExtraction],
    ):
        if not isinstance(doc_id, str) or not doc_id:
            raise CorpusFormatError("doc_id must be a non-empty string")
        if not isinstance(text_length, int) or isinstance(text_length, bool) or text_length <= 0:
            raise CorpusFormatError(f"text_length must be a positive integer, got {text_length!r}")
        self.doc_id = doc_id
        self.text_length = text_length
        self.tokens = tuple(t.lower() for t in tokens)
        self.mentions = tuple(mentions)
        self.extractions = tuple(extractions)

        counts: dict[str, int] = {}
        span: dict[str, tuple[int, int]] = {}
        for m in self.mentions:
            if not m.concept_id:
                raise CorpusFormatError("mention with empty concept_id")
            if not (0 <= m.start < m.end <= text_length):
                raise CorpusFormatError(
                    f"mention of {m.concept_id!r} at ({m.start}, {m.end}) "
                    f"is outside [0, {text_length}]"
                )
            counts[m.concept_id] = counts.get(m.concept_id, 0) + 1
            first, last = span.get(m.concept_id, (m.start, m.start))
            span[m.concept_id] = (min(first, m.start), max(last, m.start))
        self.concept_counts = counts
        self.max_concept_count = max(counts.values()) if counts else 0
        self._mention_span = span

        for ex in self.extractions:
            if ex.subject == ex.object:
                raise CorpusFormatError(
                    f"self-loop statement on {ex.subject!r} is not allowed"
                )
            if not 0.0 <= ex.confidence <= 1.0:
                raise CorpusFormatError(
                    f"statement ({ex.subject}, {ex.predicate}, {ex.object}) "
                    f"has confidence {ex.confidence!r} outside [0, 1]"
                )
            if ex.sentence_index < 0:
                raise CorpusFormatError("negative sentence index")
            for concept in (ex.subject, ex.object):
                if concept not in counts:
                    raise CorpusFormatError(
                        f"statement references unmentioned concept {concept!r}"
                    )

    def mentions_concept(self, concept_id: str) -> bool:
        return concept_id in self.concept_counts

    def mention_span(self, concept_id: str) -> tuple[int, int]:
        """(first, last) mention start offsets of a concept."""
        try:
            return self._mention_span[concept_id]
        except KeyError:
            raise AbsentConceptError(
                f"concept {concept_id!r} is not mentioned in document {self.doc_id!r}"
            ) from None

    def __repr__(self) -> str:  # pragma: no cover
        return f"Document({self.doc_id!r}, {len(self.mentions)} mentions, {len(self.extractions)} statements)"


class DocumentGraph:
    """Directed, edge-labeled graph of one document's distinct statements."""

    __slots__ = ("doc_id", "edges", "sorted_edges")

    def __init__(self, doc_id: str, edges: Mapping[Edge, EdgeRecord]):
        self.doc_id = doc_id
        self.edges = dict(edges)
        self.sorted_edges: tuple[Edge, ...] = tuple(sorted(self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: Edge) -> bool:
        return edge in self.edges

    def record(self, edge: Edge) -> EdgeRecord:
        return self.edges[edge]


def build_document_graph(doc: Document) -> DocumentGraph:
    """Collapse a document's extractions into one edge per distinct triple.

    The edge keeps the maximum confidence over its supporting extractions and
    the number of extractions that support it.
    """
    grouped: dict[Edge, list[float]] = {}
    for ex in doc.extractions:
        grouped.setdefault(ex.edge, []).append(ex.confidence)
    edges = {
        edge: EdgeRecord(max_confidence=max(confs), support_count=len(confs))
        for edge, confs in grouped.items()
    }
    return DocumentGraph(doc.doc_id, edges)


@dataclass(frozen=True)
class CorpusStats:
    """Corpus-wide concept statistics: document count and document frequency."""

    doc_count: int
    concept_df: Mapping[str, int]

    @classmethod
    def from_documents(cls, documents: Iterable[Document]) -> "CorpusStats":
        df: dict[str, int] = {}
        n = 0
        for doc in documents:
            n += 1
            for concept in doc.concept_counts:
                df[concept] = df.get(concept, 0) + 1
        return cls(doc_count=n, concept_df=df)


def concept_tf(concept_id: str, doc: Document) -> float:
    """Occurrence count of the concept divided by the document's maximum count."""
    count = doc.concept_counts.get(concept_id)
    if count is None:
        raise AbsentConceptError(
            f"concept {concept_id!r} is not mentioned in document {doc.doc_id!r}"
        )
    return count / doc.max_concept_count


def concept_idf(concept_id: str, stats: CorpusStats) -> float:
    """Natural-log idf; concepts absent from the corpus contribute 0."""
    df = stats.concept_df.get(concept_id)
    if not df or stats.doc_count <= 0:
        return 0.0
    return math.log(stats.doc_count / df)


def concept_coverage(concept_id: str, doc: Document) -> float:
    """Spread of a concept's mentions across the document text, in [0, 1).

    Distance between the last and first mention start offsets, normalized by
    text length. A concept mentioned once has coverage 0.
    """
    first, last = doc.mention_span(concept_id)
    return (last - first) / doc.text_length


class Corpus:
    """Immutable collection of documents with graphs and statistics."""

    def __init__(self, documents: Iterable[Document]):
        self._documents: dict[str, Document] = {}
        for doc in documents:
            if doc.doc_id in self._documents:
                raise CorpusFormatError(f"duplicate doc_id {doc.doc_id!r}")
            self._documents[doc.doc_id] = doc
        self._graphs = {
            doc_id: build_document_graph(doc) for doc_id, doc in self._documents.items()
        }
        self.stats = CorpusStats.from_documents(self._documents.values())

    def __len__(self) -> int:
        return len(self._documents)

    @property
    def doc_count(self) -> int:
        return len(self._documents)

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(self._documents)

    def document(self, doc_id: str) -> Document:
        return self._documents[doc_id]

    def graph(self, doc_id: str) -> DocumentGraph:
        return self._graphs[doc_id]

    def documents(self) -> Iterator[Document]:
        return iter(self._documents.values())


def _require(record: Mapping, field: str, kind, where: str):
    if field not in record:
        raise CorpusFormatError(f"{where}: missing field {field!r}")
    value = record[field]
    if kind is int and isinstance(value, bool):
        raise CorpusFormatError(f"{where}: field {field!r} must be an integer")
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind):
        raise CorpusFormatError(
            f"{where}: field {field!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def parse_document_record(record: Mapping, where: str = "<record>") -> Document:
    """Build a validated Document from one decoded corpus record."""
    if not isinstance(record, Mapping):
        raise CorpusFormatError(f"{where}: record must be a JSON object")
    doc_id = _require(record, "doc_id", str, where)
    text_length = _require(record, "text_length", int, where)
    tokens = _require(record, "tokens", list, where)
    if not all(isinstance(t, str) for t in tokens):
        raise CorpusFormatError(f"{where}: tokens must all be strings")
    mentions = []
    for m in _require(record, "mentions", list, where):
        if not isinstance(m, Mapping):
            raise CorpusFormatError(f"{where}: mention entries must be objects")
        mentions.append(
            ConceptMention(
                concept_id=_require(m, "concept_id", str, where),
                start=_require(m, "start", int, where),
                end=_require(m, "end", int, where),
            )
        )
    statements = []
    for s in _require(record, "statements", list, where):
        if not isinstance(s, Mapping):
            raise CorpusFormatError(f"{where}: statement entries must be objects")
        statements.append(
            StatementExtraction(
                subject=_require(s, "subject", str, where),
                predicate=_require(s, "predicate", str, where),
                object=_require(s, "object", str, where),
                confidence=_require(s, "confidence", float, where),
                sentence_index=_require(s, "sentence", int, where),
            )
        )
    try:
        return Document(doc_id, text_length, tokens, mentions, statements)
    except CorpusFormatError as exc:
        raise CorpusFormatError(f"{where}: {exc}") from None


def document_to_record(doc: Document) -> dict:
    """Canonical JSON-ready form of a document (inverse of parsing)."""
    return {
        "doc_id": doc.doc_id,
        "text_length": doc.text_length,
        "tokens": list(doc.tokens),
        "mentions": [
            {"concept_id": m.concept_id, "start": m.start, "end": m.end}
            for m in doc.mentions
        ],
        "statements": [
            {
                "subject": s.subject,
                "predicate": s.predicate,
                "object": s.object,
                "confidence": s.confidence,
                "sentence": s.sentence_index,
            }
            for s in doc.extractions
        ],
    }


def ingest_documents(source: str | Path) -> Corpus:
    """Load a line-delimited JSON corpus file into a Corpus.

    The first malformed record aborts ingestion with its file and line number.
    """
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read corpus file {path}: {exc}") from exc
    documents = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{where}: invalid JSON ({exc.msg})") from None
        documents.append(parse_document_record(record, where))
    return Corpus(documents)
