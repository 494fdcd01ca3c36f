"""Corpus ingestion, document graphs, and concept statistics."""

import math
import random

import pytest

from docgraph.corpus import (
    ConceptMention,
    Corpus,
    CorpusStats,
    Document,
    StatementExtraction,
    build_document_graph,
    concept_coverage,
    concept_idf,
    concept_tf,
    ingest_documents,
)
from docgraph.errors import AbsentConceptError, CorpusFormatError

from randgen import corpus_from_raw, random_raw_corpus


def make_doc(doc_id="D", length=100, mentions=(), statements=()):
    return Document(
        doc_id,
        length,
        [],
        [ConceptMention(c, s, e) for c, s, e in mentions],
        [StatementExtraction(s, p, o, conf, 0) for s, p, o, conf in statements],
    )


class TestIngestion:
    def test_fix1_doc_count(self, fix1_corpus):
        assert fix1_corpus.doc_count == 2
        assert fix1_corpus.doc_ids == ("D-A", "D-B")

    def test_out_of_range_confidence_rejected(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(
            '{"doc_id": "X", "text_length": 10, "tokens": [], '
            '"mentions": [{"concept_id": "A", "start": 0, "end": 2}, '
            '{"concept_id": "B", "start": 3, "end": 5}], '
            '"statements": [{"subject": "A", "predicate": "treats", '
            '"object": "B", "confidence": 1.3, "sentence": 0}]}\n'
        )
        with pytest.raises(CorpusFormatError, match=r"bad\.jsonl:1.*1\.3"):
            ingest_documents(bad)

    def test_empty_file_gives_empty_corpus(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        corpus = ingest_documents(empty)
        assert corpus.doc_count == 0
        assert corpus.stats.doc_count == 0

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        path.write_text('{"doc_id": "A"}\nnot json\n')
        with pytest.raises(CorpusFormatError, match=r"broken\.jsonl:1"):
            ingest_documents(path)

    def test_mention_offsets_validated(self):
        with pytest.raises(CorpusFormatError, match="outside"):
            make_doc(mentions=[("A", 50, 120)])
        with pytest.raises(CorpusFormatError, match="outside"):
            make_doc(mentions=[("A", 5, 5)])

    def test_statement_must_reference_mentions(self):
        with pytest.raises(CorpusFormatError, match="unmentioned"):
            make_doc(mentions=[("A", 0, 2)], statements=[("A", "treats", "B", 0.5)])

    def test_self_loop_statement_rejected(self):
        with pytest.raises(CorpusFormatError, match="self-loop"):
            make_doc(mentions=[("A", 0, 2)], statements=[("A", "treats", "A", 0.5)])

    def test_duplicate_doc_id_rejected(self):
        doc = make_doc(mentions=[("A", 0, 2)])
        with pytest.raises(CorpusFormatError, match="duplicate"):
            Corpus([doc, make_doc(mentions=[("A", 0, 2)])])

    def test_missing_file(self, tmp_path):
        with pytest.raises(CorpusFormatError, match="cannot read"):
            ingest_documents(tmp_path / "nope.jsonl")


class TestDocumentGraph:
    def test_max_confidence_and_support(self, fix1_corpus):
        graph = fix1_corpus.graph("D-A")
        record = graph.record(("M", "treats", "DM"))
        assert record.max_confidence == 0.8
        assert record.support_count == 2

    def test_single_extraction_identity(self, fix1_corpus):
        record = fix1_corpus.graph("D-A").record(("M", "associated", "H"))
        assert record.max_confidence == 0.4
        assert record.support_count == 1

    def test_no_extractions_empty_graph(self):
        doc = make_doc(mentions=[("A", 0, 2)])
        assert len(build_document_graph(doc)) == 0

    def test_monotone_in_added_support(self):
        rng = random.Random(7)
        for _ in range(50):
            confs = [round(rng.uniform(0, 1), 3) for _ in range(rng.randint(1, 6))]
            doc = make_doc(
                mentions=[("A", 0, 2), ("B", 5, 8)],
                statements=[("A", "treats", "B", c) for c in confs],
            )
            record = build_document_graph(doc).record(("A", "treats", "B"))
            assert record.max_confidence == max(confs)
            assert record.support_count == len(confs)
            extra = round(rng.uniform(0, 1), 3)
            doc2 = make_doc(
                mentions=[("A", 0, 2), ("B", 5, 8)],
                statements=[("A", "treats", "B", c) for c in confs + [extra]],
            )
            record2 = build_document_graph(doc2).record(("A", "treats", "B"))
            assert record2.max_confidence >= record.max_confidence


class TestConceptStats:
    def test_tf_fix1(self, fix1_corpus):
        doc = fix1_corpus.document("D-A")
        assert concept_tf("M", doc) == 1.0
        assert concept_tf("H", doc) == 0.5

    def test_tf_all_singletons(self):
        doc = make_doc(mentions=[("A", 0, 2), ("B", 5, 8), ("C", 10, 14)])
        assert all(concept_tf(c, doc) == 1.0 for c in "ABC")

    def test_tf_absent_concept(self, fix1_corpus):
        with pytest.raises(AbsentConceptError):
            concept_tf("ZZZ", fix1_corpus.document("D-A"))

    def test_idf_fix1(self, fix1_corpus):
        assert concept_idf("M", fix1_corpus.stats) == 0.0
        assert concept_idf("H", fix1_corpus.stats) == pytest.approx(math.log(2), abs=1e-12)
        assert concept_idf("NEVER-SEEN", fix1_corpus.stats) == 0.0

    def test_coverage_fix1(self, fix1_corpus):
        doc = fix1_corpus.document("D-A")
        assert concept_coverage("M", doc) == pytest.approx(0.60)
        assert concept_coverage("H", doc) == 0.0

    def test_coverage_extremes(self):
        doc = make_doc(length=100, mentions=[("A", 0, 2), ("A", 99, 100)])
        assert concept_coverage("A", doc) == pytest.approx(99 / 100)

    def test_coverage_absent(self, fix1_corpus):
        with pytest.raises(AbsentConceptError):
            concept_coverage("ZZZ", fix1_corpus.document("D-B"))


class TestProperties:
    def test_tf_bounds_and_maximizer(self):
        rng = random.Random(11)
        for _ in range(40):
            corpus = corpus_from_raw(random_raw_corpus(rng, max_docs=8))
            for doc in corpus.documents():
                tfs = [concept_tf(c, doc) for c in doc.concept_counts]
                assert all(0.0 < tf <= 1.0 for tf in tfs)
                assert any(tf == 1.0 for tf in tfs)

    def test_coverage_bounds_and_monotonicity(self):
        rng = random.Random(12)
        for _ in range(40):
            length = rng.randint(20, 200)
            starts = sorted(rng.sample(range(length - 1), rng.randint(1, 5)))
            doc = make_doc(length=length, mentions=[("A", s, s + 1) for s in starts])
            cov = concept_coverage("A", doc)
            assert 0.0 <= cov < 1.0
            later = rng.randrange(max(starts), length - 1) if max(starts) < length - 1 else max(starts)
            doc2 = make_doc(
                length=length, mentions=[("A", s, s + 1) for s in starts + [later]]
            )
            assert concept_coverage("A", doc2) >= cov

    def test_idf_nonincreasing_in_df(self):
        for n in (1, 2, 5, 20):
            values = [
                concept_idf("c", CorpusStats(doc_count=n, concept_df={"c": df}))
                for df in range(1, n + 1)
            ]
            assert values == sorted(values, reverse=True)
            assert values[-1] == 0.0  # df == doc_count

    def test_rebuild_is_deterministic(self, fixtures_dir):
        a = ingest_documents(fixtures_dir / "fix1_corpus.jsonl")
        b = ingest_documents(fixtures_dir / "fix1_corpus.jsonl")
        assert a.doc_ids == b.doc_ids
        assert a.stats == b.stats
        for doc_id in a.doc_ids:
            assert a.graph(doc_id).edges == b.graph(doc_id).edges
