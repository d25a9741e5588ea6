import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgmarkov.markov import (
    LOADED_ROW_SUM_TOL,
    OBSERVED,
    UNOBSERVED,
    Distribution,
    MarkovError,
    PairCounts,
    SecondOrderMatrix,
    StateSpace,
    TransitionCounts,
    TransitionMatrix,
    count_pair_transitions,
    count_transitions,
    counts_from_dict,
    dumps_matrix,
    estimate_first_order,
    estimate_second_order,
    format_probability,
    loads_matrix,
    matrix_from_dict,
    matrix_power,
    matrix_to_dict,
    predict,
    predict_second_order,
)

from conftest import EXAMPLE_P, EXAMPLE_P2, LOCATIONS3
from oracles import naive_power, rational_estimate

SPACE3 = StateSpace(LOCATIONS3)


def example_matrix():
    return TransitionMatrix(SPACE3, EXAMPLE_P)


def example_second_order():
    return SecondOrderMatrix(SPACE3, EXAMPLE_P2, row_sum_tol=LOADED_ROW_SUM_TOL)


class TestStateSpace:
    def test_preserves_given_order(self):
        s = StateSpace(("b", "a"))
        assert s.states == ("b", "a")
        assert s.index("a") == 1

    def test_from_observations_sorts_distinct_labels(self):
        s = StateSpace.from_observations(["z", "a", "z", "m"])
        assert s.states == ("a", "m", "z")

    @pytest.mark.parametrize("bad", [(), ("a", "a"), ("a", ""), ("a", 3)])
    def test_rejects_bad_state_lists(self, bad):
        with pytest.raises(MarkovError):
            StateSpace(bad)

    def test_unknown_state_lookup(self):
        with pytest.raises(MarkovError, match="nowhere"):
            SPACE3.index("nowhere")


class TestCounting:
    def test_counts_a_short_sequence_by_hand(self):
        c = count_transitions(["a", "b", "a", "a", "b"])
        assert c.space.states == ("a", "b")
        assert c.matrix.tolist() == [[1, 2], [1, 0]]
        assert c.count("a", "b") == 2
        assert c.row_total("a") == 3
        assert c.total() == 4

    def test_single_observation_yields_zero_counts(self):
        c = count_transitions(["a"], StateSpace(("a", "b")))
        assert c.matrix.tolist() == [[0, 0], [0, 0]]

    def test_total_is_sequence_length_minus_one(self):
        labels = ["location1", "location2", "location2", "location3", "location1"]
        assert count_transitions(labels).total() == len(labels) - 1

    def test_unknown_label_is_named_in_the_error(self):
        with pytest.raises(MarkovError, match="location9"):
            count_transitions(["location1", "location9"], SPACE3)

    def test_pair_counts_by_hand(self):
        c = count_pair_transitions(["a", "b", "a", "b", "b"])
        # triples: (a,b)->a, (b,a)->b, (a,b)->b
        assert c.matrix.tolist() == [[0, 0], [1, 1], [0, 1], [0, 0]]
        assert c.row_total("a", "b") == 2
        assert c.pair_index("b", "a") == 2

    def test_pair_total_is_sequence_length_minus_two(self):
        labels = ["location1", "location2", "location2", "location3", "location1"]
        assert int(count_pair_transitions(labels, SPACE3).matrix.sum()) == len(labels) - 2

    @given(st.lists(st.sampled_from(("a", "b", "c")), min_size=1, max_size=60))
    @settings(max_examples=50)
    def test_count_conservation(self, labels):
        space = StateSpace(("a", "b", "c"))
        assert int(count_transitions(labels, space).matrix.sum()) == len(labels) - 1
        if len(labels) >= 2:
            assert int(count_pair_transitions(labels, space).matrix.sum()) == len(labels) - 2


class TestEstimation:
    def test_worked_row(self):
        c = TransitionCounts(SPACE3, [[12, 9, 11], [0, 0, 0], [0, 0, 0]])
        m = estimate_first_order(c)
        assert m.p[0].tolist() == [12 / 32, 9 / 32, 11 / 32]
        assert m.probability("location1", "location2") == 0.28125

    def test_unobserved_rows_are_flagged_not_uniform(self):
        c = TransitionCounts(SPACE3, [[12, 9, 11], [0, 0, 0], [0, 0, 0]])
        m = estimate_first_order(c)
        assert m.row_status == (OBSERVED, UNOBSERVED, UNOBSERVED)
        assert m.p[1].tolist() == [0.0, 0.0, 0.0]
        assert not m.fully_observed()

    def test_smoothing_fills_every_row(self):
        c = TransitionCounts(SPACE3, [[2, 0, 0], [0, 0, 0], [0, 0, 0]])
        m = estimate_first_order(c, smoothing=1.0)
        assert m.row_status == (OBSERVED,) * 3
        assert m.p[0].tolist() == [3 / 5, 1 / 5, 1 / 5]
        assert m.p[1].tolist() == [1 / 3, 1 / 3, 1 / 3]

    def test_smoothing_defaults_off(self):
        c = TransitionCounts(SPACE3, [[2, 0, 0], [0, 0, 0], [0, 0, 0]])
        assert estimate_first_order(c).p[0].tolist() == [1.0, 0.0, 0.0]

    def test_negative_smoothing_rejected(self):
        c = TransitionCounts(SPACE3, np.zeros((3, 3)))
        with pytest.raises(MarkovError):
            estimate_first_order(c, smoothing=-0.5)

    @given(
        st.lists(
            st.lists(st.integers(0, 20), min_size=3, max_size=3),
            min_size=3, max_size=3,
        )
    )
    @settings(max_examples=60)
    def test_estimates_match_exact_rational_arithmetic(self, rows):
        c = TransitionCounts(SPACE3, rows)
        m = estimate_first_order(c)
        expected = rational_estimate(np.asarray(rows))
        for i in range(3):
            for j in range(3):
                assert m.p[i, j] == float(expected[i][j])

    def test_second_order_estimation(self):
        labels = ["a", "b", "a", "b", "a", "b", "b"]
        pc = count_pair_transitions(labels)
        m = estimate_second_order(pc)
        # (a,b) occurred 3 times: followed by a twice, b once
        assert m.probability("a", "b", "a") == pytest.approx(2 / 3)
        assert m.probability("a", "b", "b") == pytest.approx(1 / 3)
        assert m.row_status[m.pair_index("a", "a")] == UNOBSERVED


class TestMatrixValidation:
    def test_shape_mismatch(self):
        with pytest.raises(MarkovError):
            TransitionMatrix(SPACE3, np.zeros((2, 3)))

    def test_row_sum_out_of_tolerance(self):
        bad = [[0.5, 0.4, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
        with pytest.raises(MarkovError):
            TransitionMatrix(SPACE3, bad)

    def test_negative_entry(self):
        bad = [[1.2, -0.2, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
        with pytest.raises(MarkovError):
            TransitionMatrix(SPACE3, bad)

    def test_unobserved_row_must_be_zero(self):
        p = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
        with pytest.raises(MarkovError):
            TransitionMatrix(SPACE3, p, (OBSERVED, UNOBSERVED, OBSERVED))

    def test_bad_status_value(self):
        p = np.eye(3)
        with pytest.raises(MarkovError):
            TransitionMatrix(SPACE3, p, ("observed", "guessed", "observed"))

    def test_loose_tolerance_admits_published_rounding(self):
        m = TransitionMatrix(SPACE3, EXAMPLE_P2[:3], row_sum_tol=LOADED_ROW_SUM_TOL)
        assert m.row_sum_tol == LOADED_ROW_SUM_TOL
        with pytest.raises(MarkovError):
            TransitionMatrix(SPACE3, EXAMPLE_P2[:3], row_sum_tol=1e-9)


class TestPower:
    def test_zero_steps_is_identity(self):
        m = matrix_power(example_matrix(), 0)
        assert np.array_equal(m.p, np.eye(3))

    def test_one_step_is_the_matrix_itself(self):
        base = example_matrix()
        assert np.allclose(matrix_power(base, 1).p, base.p, atol=0)

    def test_permutation_matrix_cycles(self):
        cycle = TransitionMatrix(SPACE3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        assert np.array_equal(matrix_power(cycle, 3).p, np.eye(3))
        assert np.array_equal(matrix_power(cycle, 7).p, cycle.p)

    def test_negative_steps_rejected(self):
        with pytest.raises(MarkovError):
            matrix_power(example_matrix(), -1)

    def test_unobserved_rows_block_powering(self):
        c = TransitionCounts(SPACE3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
        m = estimate_first_order(c)
        with pytest.raises(MarkovError, match="unobserved"):
            matrix_power(m, 2)

    @given(st.integers(0, 12), st.integers(0, 2**32 - 1), st.sampled_from((3, 5)))
    @settings(max_examples=60, deadline=None)
    def test_matches_the_naive_oracle(self, steps, seed, size):
        rng = np.random.default_rng(seed)
        p = rng.random((size, size)) + 1e-9
        p /= p.sum(axis=1, keepdims=True)
        m = TransitionMatrix(StateSpace(tuple(f"s{i}" for i in range(size))), p)
        assert np.max(np.abs(matrix_power(m, steps).p - naive_power(p, steps))) <= 1e-12

    @given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_semigroup_property(self, a, b, seed):
        rng = np.random.default_rng(seed)
        p = rng.random((3, 3)) + 1e-9
        p /= p.sum(axis=1, keepdims=True)
        m = TransitionMatrix(SPACE3, p)
        combined = matrix_power(m, a + b).p
        split = matrix_power(m, a).p @ matrix_power(m, b).p
        assert np.max(np.abs(combined - split)) <= 1e-9


class TestPrediction:
    def test_one_step_is_a_row_lookup(self):
        d = predict(example_matrix(), "location3")
        assert d.probability("location2") == 0.290
        assert d.as_pairs() == [
            ("location1", 0.355), ("location2", 0.290), ("location3", 0.355)
        ]

    def test_multi_step_uses_the_powered_matrix(self):
        base = example_matrix()
        d = predict(base, "location1", steps=2)
        assert np.allclose(d.mass, (base.p @ base.p)[0], atol=0)

    def test_distribution_mass_sums_to_one(self):
        d = predict(example_matrix(), "location1", steps=5)
        assert abs(d.mass.sum() - 1.0) <= d.tol

    def test_predicting_from_an_unobserved_state_fails(self):
        c = TransitionCounts(SPACE3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
        m = estimate_first_order(c)
        with pytest.raises(MarkovError, match="location2"):
            predict(m, "location2")

    def test_zero_steps_rejected(self):
        with pytest.raises(MarkovError):
            predict(example_matrix(), "location1", steps=0)

    def test_second_order_lookup(self):
        m = example_second_order()
        d = predict_second_order(m, "location1", "location2")
        assert d.probability("location3") == 0.222
        assert d.probability("location1") == 0.333

    def test_unobserved_pair_mentions_sparsity(self):
        labels = ["a", "b", "c"]
        m = estimate_second_order(count_pair_transitions(labels))
        with pytest.raises(MarkovError, match="never observed"):
            predict_second_order(m, "b", "a")

    def test_distribution_validation(self):
        with pytest.raises(MarkovError):
            Distribution(SPACE3, [0.5, 0.1, 0.1])
        with pytest.raises(MarkovError):
            Distribution(SPACE3, [1.5, -0.25, -0.25])


class TestDisplay:
    @pytest.mark.parametrize(
        "value,text",
        [(0.28125, "0.281"), (0.375, "0.375"), (0.29, "0.290"), (1.0, "1.000"),
         (0.34375, "0.344"), (0.0, "0.000")],
    )
    def test_three_decimal_rendering(self, value, text):
        assert format_probability(value) == text


class TestFileFormat:
    def test_first_order_round_trip_with_counts(self):
        c = TransitionCounts(SPACE3, [[12, 9, 11], [5, 5, 0], [1, 2, 3]])
        m = estimate_first_order(c)
        loaded_m, loaded_c = loads_matrix(dumps_matrix(m, c))
        assert isinstance(loaded_m, TransitionMatrix)
        assert loaded_m.space == m.space
        assert np.array_equal(loaded_m.p, m.p)
        assert loaded_m.row_status == m.row_status
        assert loaded_c == c

    def test_second_order_round_trip(self):
        labels = ["a", "b", "a", "b", "a"]
        pc = count_pair_transitions(labels)
        m = estimate_second_order(pc)
        loaded_m, loaded_c = loads_matrix(dumps_matrix(m, pc))
        assert isinstance(loaded_m, SecondOrderMatrix)
        assert np.array_equal(loaded_m.p, m.p)
        assert loaded_c == pc

    def test_counts_are_optional(self):
        text = dumps_matrix(example_matrix())
        m, c = loads_matrix(text)
        assert c is None

    def test_serialization_is_stable(self):
        c = TransitionCounts(SPACE3, [[12, 9, 11], [5, 5, 0], [1, 2, 3]])
        m = estimate_first_order(c)
        assert dumps_matrix(m, c) == dumps_matrix(m, c)

    def test_format_field_is_checked(self):
        data = matrix_to_dict(example_matrix())
        data["format"] = 2
        with pytest.raises(MarkovError, match="format"):
            matrix_from_dict(data)

    def test_order_field_is_checked(self):
        data = matrix_to_dict(example_matrix())
        data["order"] = 3
        with pytest.raises(MarkovError, match="order"):
            matrix_from_dict(data)

    def test_row_status_is_required(self):
        data = matrix_to_dict(example_matrix())
        del data["row_status"]
        with pytest.raises(MarkovError, match="row_status"):
            matrix_from_dict(data)

    def test_counts_must_match_the_space(self):
        other = TransitionCounts(StateSpace(("x", "y", "z")), np.ones((3, 3)))
        with pytest.raises(MarkovError):
            matrix_to_dict(example_matrix(), other)

    def test_counts_must_match_the_order(self):
        pc = PairCounts(SPACE3, np.zeros((9, 3)))
        with pytest.raises(MarkovError):
            matrix_to_dict(example_matrix(), pc)

    def test_bad_json_text(self):
        with pytest.raises(MarkovError, match="JSON"):
            loads_matrix("not json at all")

    def test_counts_from_dict_without_counts(self):
        assert counts_from_dict(matrix_to_dict(example_matrix())) is None
