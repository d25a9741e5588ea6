import pytest

from kgmarkov.ingest import default_manifest, ingest_rows
from kgmarkov.markov import StateSpace, TransitionCounts, count_transitions
from kgmarkov.rdf import Graph, Iri, Triple, integer_literal, serialize_ntriples, string_literal
from kgmarkov.writeback import (
    MODEL_CCO,
    MODEL_PROFILE,
    PREDICTED_FLAG,
    ProbabilityAssertion,
    WritebackError,
    read_probabilities,
    state_token,
    writeback_cco_model,
    writeback_profile_model,
)

from conftest import LOCATIONS3, THREE_DAY_ROWS

EX = "http://example.org/data/"


def worked_counts():
    return TransitionCounts(
        StateSpace(LOCATIONS3), [[12, 9, 11], [0, 0, 0], [0, 0, 0]]
    )


class TestStateToken:
    @pytest.mark.parametrize(
        "label,token",
        [("location1", "1"), ("location12", "12"), ("harbor", "harbor"),
         ("open sea", "open_sea"), ("dock-4", "dock_4")],
    )
    def test_tokens(self, label, token):
        assert state_token(label) == token


class TestProbabilityAssertion:
    def test_value_is_the_exact_quotient(self):
        a = ProbabilityAssertion("location1", "location2", 9, 32,
                                 Iri(EX + "s"), Iri(EX + "p"))
        assert a.value == 9 / 32

    def test_rejects_bad_fractions(self):
        with pytest.raises(WritebackError):
            ProbabilityAssertion("a", "b", -1, 32, Iri(EX + "s"), Iri(EX + "p"))
        with pytest.raises(WritebackError):
            ProbabilityAssertion("a", "b", 0, 0, Iri(EX + "s"), Iri(EX + "p"))


class TestProfileModel:
    def test_worked_row_produces_the_published_values(self):
        g = Graph()
        assertions = writeback_profile_model(g, worked_counts(), "location1", 100)
        by_state = {a.to_state: a for a in assertions}
        assert by_state["location1"].value == 0.375
        assert by_state["location2"].value == 0.28125
        assert by_state["location3"].value == 0.34375
        assert sum(a.value for a in assertions) == 1.0

    def test_structure_of_the_pattern_of_life(self, vocab):
        g = Graph()
        writeback_profile_model(g, worked_counts(), "location1", 100, vocab=vocab)
        pol = Iri(EX + "fishingVessel_PoL")
        assert Triple(pol, vocab.type, vocab.PatternOfLife) in g
        assert Triple(pol, vocab.type, vocab.PatternProcessProfile) in g
        assert Triple(pol, vocab.occurrent_part_of, Iri(EX + "fishingTrip")) in g
        part = Iri(EX + "1to2_PoL_Part")
        assert Triple(part, vocab.occurrent_part_of, pol) in g
        disp = Iri(EX + "1to2_Disposition")
        assert Triple(disp, vocab.type, vocab.Disposition) in g
        assert Triple(disp, vocab.inheres_in, Iri(EX + "fishingVessel")) in g

    def test_counts_and_total_are_stored_as_integers(self, vocab):
        g = Graph()
        writeback_profile_model(g, worked_counts(), "location1", 100, vocab=vocab)
        total = Iri(EX + "total1toXTransitions")
        assert Triple(total, vocab.has_integer_value, integer_literal(32)) in g
        count = Iri(EX + "1to2TransitionCount")
        assert Triple(count, vocab.has_integer_value, integer_literal(9)) in g
        assert Triple(count, vocab.is_a_measurement_of, Iri(EX + "1to2_PoL_Part")) in g

    def test_zero_count_keeps_its_count_ice_but_gets_no_pmice(self, vocab):
        counts = TransitionCounts(
            StateSpace(LOCATIONS3), [[0, 0, 0], [0, 0, 0], [0, 0, 1]]
        )
        g = Graph()
        assertions = writeback_profile_model(g, counts, "location3", 3, vocab=vocab)
        assert [a.to_state for a in assertions] == ["location3"]
        assert Triple(Iri(EX + "3to1TransitionCount"), vocab.has_integer_value,
                      integer_literal(0)) in g
        assert not g.match(Iri(EX + "markovPMICE_3to1"), None, None)
        assert g.match(Iri(EX + "markovPMICE_3to3"), None, None)

    def test_nothing_points_at_a_future_process(self, vocab):
        g = Graph()
        writeback_profile_model(g, worked_counts(), "location1", 100, vocab=vocab)
        assert not g.match(None, vocab.predicted, None)
        assert not g.match(None, vocab.modally_about, None)

    def test_zero_total_row_is_an_error(self):
        with pytest.raises(WritebackError, match="location2"):
            writeback_profile_model(Graph(), worked_counts(), "location2", 100)

    def test_round_trip_through_the_graph(self):
        g = Graph()
        writeback_profile_model(g, worked_counts(), "location1", 100)
        d = read_probabilities(g, "location1", MODEL_PROFILE)
        assert d.space.states == LOCATIONS3
        assert d.probability("location1") == 0.375
        assert d.probability("location2") == 0.28125
        assert d.probability("location3") == 0.34375

    def test_round_trip_with_a_zero_entry(self):
        counts = TransitionCounts(
            StateSpace(LOCATIONS3), [[0, 0, 0], [0, 0, 0], [1, 0, 1]]
        )
        g = Graph()
        writeback_cco_side = writeback_profile_model(g, counts, "location3", 2)
        assert len(writeback_cco_side) == 2
        d = read_probabilities(g, "location3", MODEL_PROFILE)
        assert d.probability("location2") == 0.0
        assert d.probability("location1") == 0.5

    def test_link_realizations_adds_one_edge_per_matching_day(self, vocab):
        g = ingest_rows(THREE_DAY_ROWS)
        counts = count_transitions(["location3", "location1", "location3"],
                                   StateSpace(LOCATIONS3))
        before = len(g)
        writeback_profile_model(g, counts, "location3", 3, vocab=vocab,
                                link_realizations=True)
        # days 1 and 2 both start a transition; only day 1 starts at location3
        realized = g.match(None, vocab.realizes, None)
        assert len(realized) == 1
        assert realized[0].subject == Iri(EX + "fishingTripPart_d2")
        assert realized[0].object == Iri(EX + "3to1_Disposition")
        assert len(g) > before

    def test_without_the_flag_no_realizes_edges_appear(self, vocab):
        g = ingest_rows(THREE_DAY_ROWS)
        counts = count_transitions(["location3", "location1", "location3"],
                                   StateSpace(LOCATIONS3))
        writeback_profile_model(g, counts, "location3", 3, vocab=vocab)
        assert not g.match(None, vocab.realizes, None)

    def test_writeback_is_idempotent(self):
        g = Graph()
        writeback_profile_model(g, worked_counts(), "location1", 100)
        text = serialize_ntriples(g)
        writeback_profile_model(g, worked_counts(), "location1", 100)
        assert serialize_ntriples(g) == text


class TestCcoModel:
    def test_mints_a_flagged_future_part(self, vocab):
        g = Graph()
        writeback_cco_model(g, worked_counts(), "location1", 100, vocab=vocab)
        future = Iri(EX + "fishingTripPart_101")
        assert Triple(future, vocab.type, vocab.Process) in g
        assert Triple(future, vocab.predicted, string_literal(PREDICTED_FLAG)) in g
        # the future part carries no datetime and no location of its own
        assert len(g.match(future, None, None)) == 2

    def test_pmices_point_at_the_future_part(self, vocab):
        g = Graph()
        assertions = writeback_cco_model(g, worked_counts(), "location1", 100,
                                         vocab=vocab)
        future = Iri(EX + "fishingTripPart_101")
        assert len(assertions) == 3
        for a in assertions:
            assert a.subject_iri == future
            assert Triple(a.pmice_iri, vocab.type, vocab.MarkovPMICE) in g
            assert Triple(a.pmice_iri, vocab.modally_about, future) in g
        names = sorted(a.pmice_iri.local_name() for a in assertions)
        assert names == ["markovPMICE_1to1_d101", "markovPMICE_1to2_d101",
                         "markovPMICE_1to3_d101"]

    def test_zero_counts_get_no_pmice(self, vocab):
        counts = TransitionCounts(
            StateSpace(LOCATIONS3), [[0, 0, 0], [0, 0, 0], [2, 0, 1]]
        )
        g = Graph()
        assertions = writeback_cco_model(g, counts, "location3", 3, vocab=vocab)
        assert [a.to_state for a in assertions] == ["location1", "location3"]
        assert not g.match(None, None, Iri(EX + "markovPMICE_3to2_d4"))

    def test_round_trip_through_the_graph(self):
        g = ingest_rows(THREE_DAY_ROWS)
        counts = count_transitions(["location3", "location1", "location3"],
                                   StateSpace(LOCATIONS3))
        writeback_cco_model(g, counts, "location3", 3)
        d = read_probabilities(g, "location3", MODEL_CCO)
        # location2 never appears in these rows, so the graph cannot restore it
        assert d.space.states == ("location1", "location3")
        assert d.probability("location1") == 1.0

    def test_round_trip_on_a_bare_graph_covers_only_seen_states(self):
        # without ingested location individuals the zero states are unknowable
        g = Graph()
        writeback_cco_model(g, worked_counts(), "location1", 100)
        d = read_probabilities(g, "location1", MODEL_CCO)
        assert d.space.states == LOCATIONS3
        assert d.probability("location2") == 0.28125

    def test_negative_day_rejected(self):
        with pytest.raises(WritebackError):
            writeback_cco_model(Graph(), worked_counts(), "location1", -1)

    def test_writebacks_for_two_days_coexist(self, vocab):
        g = Graph()
        writeback_cco_model(g, worked_counts(), "location1", 100, vocab=vocab)
        writeback_cco_model(g, worked_counts(), "location1", 101, vocab=vocab)
        assert g.match(Iri(EX + "markovPMICE_1to2_d101"), None, None)
        assert g.match(Iri(EX + "markovPMICE_1to2_d102"), None, None)

    def test_writeback_is_idempotent(self):
        g = Graph()
        writeback_cco_model(g, worked_counts(), "location1", 100)
        text = serialize_ntriples(g)
        writeback_cco_model(g, worked_counts(), "location1", 100)
        assert serialize_ntriples(g) == text


class TestReadback:
    def test_both_models_agree_on_the_same_counts(self):
        g1, g2 = Graph(), Graph()
        writeback_profile_model(g1, worked_counts(), "location1", 100)
        writeback_cco_model(g2, worked_counts(), "location1", 100)
        d1 = read_probabilities(g1, "location1", MODEL_PROFILE)
        d2 = read_probabilities(g2, "location1", MODEL_CCO)
        assert d1.space.states == d2.space.states
        assert d1.mass.tolist() == d2.mass.tolist()

    def test_unknown_model_name(self):
        with pytest.raises(WritebackError, match="model"):
            read_probabilities(Graph(), "location1", "bayes")

    def test_missing_writeback_is_an_error(self):
        g = ingest_rows(THREE_DAY_ROWS)
        with pytest.raises(WritebackError, match="location1"):
            read_probabilities(g, "location1", MODEL_PROFILE)

    def test_reading_the_wrong_state_is_an_error(self):
        g = Graph()
        writeback_profile_model(g, worked_counts(), "location1", 100)
        with pytest.raises(WritebackError):
            read_probabilities(g, "location2", MODEL_PROFILE)
