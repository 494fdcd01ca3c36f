"""Ontology traversal, ontological similarity, and upward query rewriting."""

import random

import pytest

from docgraph.errors import OntologyFormatError
from docgraph.ontology import (
    Ontology,
    expand_concept_set_upwards,
    expand_query_upwards,
    load_ontology,
)
from docgraph.query import (
    ConceptSet,
    DisjunctiveQuery,
    ExpandedConcept,
    FactPattern,
    NarrativeQuery,
    PredicateSlot,
)

from randgen import random_ontology_edges


class TestTraversal:
    def test_subclasses_transitive(self, cancer_ontology):
        assert cancer_ontology.subclasses("Cancer") == {
            "OvarianCancer",
            "OvarianCancerSubtype",
        }

    def test_leaf_has_no_subclasses(self, cancer_ontology):
        assert cancer_ontology.subclasses("OvarianCancerSubtype") == frozenset()

    def test_unknown_id_empty(self, cancer_ontology):
        assert cancer_ontology.subclasses("Nope") == frozenset()
        assert cancer_ontology.superclasses("Nope") == frozenset()

    def test_superclasses_transitive(self, cancer_ontology):
        assert cancer_ontology.superclasses("OvarianCancerSubtype") == {
            "OvarianCancer",
            "Cancer",
        }

    def test_root_has_no_superclasses(self, cancer_ontology):
        assert cancer_ontology.superclasses("Cancer") == frozenset()


class TestOntologicalSim:
    def test_identity(self, cancer_ontology):
        assert cancer_ontology.ontological_sim("Cancer", "Cancer") == 1.0

    def test_direct_parent_half(self, cancer_ontology):
        assert cancer_ontology.ontological_sim("OvarianCancer", "Cancer") == 0.5

    def test_grandparent_third(self, cancer_ontology):
        assert cancer_ontology.ontological_sim("OvarianCancerSubtype", "Cancer") == pytest.approx(1 / 3)

    def test_unrelated_zero(self, cancer_ontology):
        assert cancer_ontology.ontological_sim("Cancer", "OvarianCancer") == 0.0
        assert cancer_ontology.ontological_sim("Cancer", "Nope") == 0.0

    def test_strictly_decreasing_in_path_length(self):
        chain = [f"N{i}" for i in range(8)]
        ontology = Ontology([(chain[i], chain[i + 1]) for i in range(7)])
        sims = [ontology.ontological_sim("N0", node) for node in chain[1:]]
        assert all(0.0 < s <= 0.5 for s in sims)
        assert sims == sorted(sims, reverse=True)
        assert len(set(sims)) == len(sims)

    def test_multi_parent_shortest_path_wins(self):
        # A -> B -> D and A -> D directly: similarity uses the short route.
        ontology = Ontology([("A", "B"), ("B", "D"), ("A", "D")])
        assert ontology.ontological_sim("A", "D") == 0.5


class TestLoading:
    def test_cycle_rejected(self):
        with pytest.raises(OntologyFormatError, match="cycle"):
            Ontology([("A", "B"), ("B", "C"), ("C", "A")])

    def test_self_edge_rejected(self):
        with pytest.raises(OntologyFormatError, match="self-parent"):
            Ontology([("A", "A")])

    def test_file_roundtrip(self, fix1_ontology):
        assert fix1_ontology.superclasses("DM") == {"MetabolicDisease"}

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "o.tsv"
        path.write_text("A\n")
        with pytest.raises(OntologyFormatError, match="child<TAB>parent"):
            load_ontology(path)


def single_pattern_query(subject_set, object_set):
    return DisjunctiveQuery(
        (subject_set, object_set),
        (NarrativeQuery([FactPattern(subject_set, PredicateSlot.wildcard(), object_set)]),),
        text="q",
    )


class TestExpansion:
    def test_transitive_superclass_expansion(self, cancer_ontology):
        subject = ConceptSet("s", "s", [ExpandedConcept("X", 1.0)])
        obj = ConceptSet("o", "o", [ExpandedConcept("OvarianCancerSubtype", 1.0)])
        expanded = expand_query_upwards(single_pattern_query(subject, obj), cancer_ontology)
        entries = {e.concept_id: e for e in expanded.node("o").entries()}
        assert entries["OvarianCancerSubtype"].score == 1.0
        assert entries["OvarianCancer"].score == 0.5
        assert entries["OvarianCancer"].origin == "superclass"
        assert entries["Cancer"].score == pytest.approx(1 / 3)

    def test_no_superclasses_unchanged(self, cancer_ontology):
        cs = ConceptSet("o", "o", [ExpandedConcept("Cancer", 1.0)])
        expanded = expand_concept_set_upwards(cs, cancer_ontology)
        assert expanded.concept_ids() == ("Cancer",)
        assert expanded.score("Cancer") == 1.0

    def test_discount_times_source_score(self, cancer_ontology):
        cs = ConceptSet("o", "o", [ExpandedConcept("OvarianCancer", 0.8)])
        expanded = expand_concept_set_upwards(cs, cancer_ontology)
        assert expanded.score("Cancer") == pytest.approx(0.4)
        # exact product of the two factors
        assert expanded.score("Cancer") == cancer_ontology.ontological_sim(
            "OvarianCancer", "Cancer"
        ) * 0.8

    def test_existing_alternative_keeps_higher_score(self, cancer_ontology):
        cs = ConceptSet(
            "o",
            "o",
            [ExpandedConcept("OvarianCancer", 1.0), ExpandedConcept("Cancer", 0.9)],
        )
        expanded = expand_concept_set_upwards(cs, cancer_ontology)
        # derivation would give 0.5; the existing 0.9 wins
        assert expanded.score("Cancer") == 0.9
        assert expanded.get("Cancer").origin == "original"

    def test_max_score_on_rederivation(self, cancer_ontology):
        cs = ConceptSet(
            "o",
            "o",
            [ExpandedConcept("OvarianCancer", 1.0), ExpandedConcept("Cancer", 0.2)],
        )
        expanded = expand_concept_set_upwards(cs, cancer_ontology)
        # derived 0.5 exceeds the existing 0.2 and replaces it
        assert expanded.score("Cancer") == 0.5

    def test_containment_query_expands_too(self, cancer_ontology):
        cs = ConceptSet("o", "o", [ExpandedConcept("OvarianCancerSubtype", 1.0)])
        query = DisjunctiveQuery((cs,), (), text="q")
        expanded = expand_query_upwards(query, cancer_ontology)
        assert expanded.is_containment
        assert set(expanded.components[0].concept_ids()) == {
            "OvarianCancerSubtype",
            "OvarianCancer",
            "Cancer",
        }

    def test_idempotent_on_concept_ids_and_scores(self):
        rng = random.Random(23)
        for _ in range(30):
            concepts = [f"C{i}" for i in range(rng.randint(3, 10))]
            ontology = Ontology(random_ontology_edges(rng, concepts)) if rng.random() < 0.9 else Ontology([])
            picked = rng.sample(concepts, rng.randint(1, len(concepts)))
            cs = ConceptSet(
                "o",
                "o",
                [ExpandedConcept(c, round(rng.uniform(0.1, 1.0), 3)) for c in picked],
            )
            once = expand_concept_set_upwards(cs, ontology)
            twice = expand_concept_set_upwards(once, ontology)
            assert set(once.concept_ids()) == set(twice.concept_ids())
            for concept in once.concept_ids():
                assert twice.score(concept) == once.score(concept)

    def test_expansion_scores_within_bounds(self):
        rng = random.Random(29)
        for _ in range(30):
            concepts = [f"C{i}" for i in range(8)]
            ontology = Ontology(random_ontology_edges(rng, concepts))
            picked = rng.sample(concepts, 3)
            cs = ConceptSet(
                "o",
                "o",
                [ExpandedConcept(c, round(rng.uniform(0.1, 1.0), 3)) for c in picked],
            )
            expanded = expand_concept_set_upwards(cs, ontology)
            best = cs.best_score
            for entry in expanded.entries():
                assert 0.0 < entry.score <= best + 1e-12
