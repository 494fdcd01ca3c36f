from pathlib import Path

import pytest

from docgraph.config import load_config
from docgraph.corpus import ingest_documents
from docgraph.ontology import Ontology, load_ontology
from docgraph.vocabulary import ConceptEntry, Vocabulary, load_vocabulary

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fix1_corpus():
    return ingest_documents(FIXTURES / "fix1_corpus.jsonl")


@pytest.fixture(scope="session")
def fix1_vocabulary():
    return load_vocabulary(FIXTURES / "fix1_vocabulary.tsv")


@pytest.fixture(scope="session")
def fix1_ontology():
    return load_ontology(FIXTURES / "fix1_ontology.tsv")


@pytest.fixture(scope="session")
def fix1_config():
    return load_config(FIXTURES / "ranking.cfg")


@pytest.fixture(scope="session")
def cancer_ontology():
    return Ontology(
        [("OvarianCancer", "Cancer"), ("OvarianCancerSubtype", "OvarianCancer")]
    )


@pytest.fixture(scope="session")
def diabetes_vocabulary():
    """The four-concept translation scenario for a 'diabetes' search."""
    return Vocabulary(
        [
            ConceptEntry("D", "gene", "", ("diabetes",)),
            ConceptEntry("DM", "disease", "", ("diabetes mellitus",)),
            ConceptEntry("DMT1", "disease", "", ("diabetes mellitus type 1",)),
            ConceptEntry("DMT2", "disease", "", ("diabetes mellitus type 2",)),
            ConceptEntry("M", "drug", "", ("metformin",)),
        ]
    )
