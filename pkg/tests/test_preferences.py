import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distortlab.preferences import (
    BT_EXP,
    BT_LINEAR,
    DegenerateComparisonError,
    PreferenceOracle,
    PreferenceProfile,
    TieError,
    UtilityMatrix,
    bt_exp_prob,
    bt_linear_prob,
    derive_profile,
    profile_from_text,
    profile_to_text,
    win_matrix_csv,
)

positive_fractions = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1000))


def test_derive_profile_worked_example_row():
    # q_3 of the three-query demonstration at beta = 1/2
    u = UtilityMatrix(((0, 1, Fraction(1, 2)),))
    assert derive_profile(u).rankings[0] == (1, 2, 0)


def test_derive_profile_sorts_descending():
    u = UtilityMatrix(((0.1, 0.9, 0.3),))
    assert derive_profile(u).rankings[0] == (1, 2, 0)


def test_derive_profile_tie_raises_with_location():
    u = UtilityMatrix(((0.5, 0.5),))
    with pytest.raises(TieError) as exc:
        derive_profile(u)
    assert exc.value.query == 0
    assert exc.value.pair == (0, 1)


@given(st.lists(positive_fractions, min_size=2, max_size=5, unique=True), positive_fractions)
def test_derive_profile_scale_invariant(row, c):
    base = derive_profile(UtilityMatrix((tuple(row),)))
    scaled = derive_profile(UtilityMatrix((tuple(c * u for u in row),)))
    assert base == scaled


def test_profile_validation_rejects_non_permutation():
    with pytest.raises(ValueError):
        PreferenceProfile(((0, 0, 1),))


def test_profile_text_round_trip():
    profile = PreferenceProfile(((0, 2, 1), (2, 1, 0)))
    assert profile_from_text(profile_to_text(profile)) == profile


def test_bt_linear_examples():
    assert bt_linear_prob(0.75, 0.25) == pytest.approx(0.75)
    assert bt_linear_prob(Fraction(3), Fraction(3)) == Fraction(1, 2)
    # utilities in ratio R/(1-R) win with probability exactly R
    r, c = Fraction(9, 10), Fraction(1, 20)
    assert bt_linear_prob(r / (1 - r) * c, c) == r
    assert bt_linear_prob(0.45, 0.05) == pytest.approx(0.9, abs=1e-12)


def test_bt_linear_degenerate():
    with pytest.raises(DegenerateComparisonError):
        bt_linear_prob(0, 0)
    with pytest.raises(ValueError):
        bt_linear_prob(-1, 2)


@given(positive_fractions, positive_fractions)
def test_bt_linear_complement_exact(a, b):
    assert bt_linear_prob(a, b) + bt_linear_prob(b, a) == 1


@given(positive_fractions, positive_fractions, positive_fractions)
def test_bt_linear_scale_invariant(a, b, c):
    assert bt_linear_prob(c * a, c * b) == bt_linear_prob(a, b)


@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_bt_linear_float_complement_exact(a, b):
    assert bt_linear_prob(a, b) + bt_linear_prob(b, a) == 1.0


def test_bt_linear_monotone():
    assert bt_linear_prob(Fraction(2), Fraction(1)) < bt_linear_prob(Fraction(3), Fraction(1))


def test_bt_exp_examples():
    assert bt_exp_prob(0, 0) == 0.5
    textbook = math.exp(1) / (math.exp(1) + math.exp(0))
    assert bt_exp_prob(1, 0) == pytest.approx(textbook, abs=1e-12)
    assert bt_exp_prob(1, 0) == pytest.approx(0.7310585786, abs=1e-9)
    # huge gaps saturate without overflow
    assert bt_exp_prob(1000, 0) == pytest.approx(1.0, abs=1e-12)
    assert bt_exp_prob(0, 1000) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_bt_exp_complement_exact(x, y):
    assert bt_exp_prob(x, y) + bt_exp_prob(y, x) == 1.0


@given(st.floats(-20, 20), st.floats(-20, 20))
def test_bt_exp_monotone(x, y):
    assert bt_exp_prob(x + 1.0, y) > bt_exp_prob(x, y)


def test_utility_matrix_flags():
    with pytest.raises(ValueError):
        UtilityMatrix(((0.6, 0.6),), unit_sum=True)
    with pytest.raises(ValueError):
        UtilityMatrix(((1.5, 0.5),), bounded01=True)
    with pytest.raises(ValueError):
        UtilityMatrix(((-0.1, 0.1),))
    u = UtilityMatrix(((Fraction(1, 3), Fraction(2, 3)),), unit_sum=True, bounded01=True)
    assert u.n == 1 and u.m == 2


class TestOracle:
    def test_noiseless_first_demo_query(self):
        # q_1 of the three-query demonstration: utility 1 vs 0, first circuit wins
        from distortlab.compromise import compromise_instance

        inst = compromise_instance(Fraction(1, 10), Fraction(1, 2))
        oracle = PreferenceOracle.noiseless(inst.utilities)
        assert oracle.sample_comparison(0, 0, 1) == 0

    def test_noiseless_matches_profile_everywhere(self):
        u = UtilityMatrix(((0.7, 0.1, 0.2), (0.2, 0.5, 0.3)))
        profile = derive_profile(u)
        oracle = PreferenceOracle.noiseless(u)
        for q in range(2):
            for i in range(3):
                for j in range(3):
                    if i != j:
                        expected = i if profile.prefers(q, i, j) else j
                        assert oracle.sample_comparison(q, i, j) == expected
                        assert oracle.exact_prob(q, i, j) == (1 if expected == i else 0)

    def test_noiseless_repeat_identical(self):
        u = UtilityMatrix(((1, 0, 0.9),))
        oracle = PreferenceOracle.noiseless(u)
        winners = {oracle.sample_comparison(0, 0, 1) for _ in range(10)}
        assert winners == {0}

    def test_profile_backed_oracle_has_no_utilities(self):
        oracle = PreferenceOracle.noiseless_from_profile(PreferenceProfile(((0, 1),)))
        assert oracle.utilities is None
        assert oracle.sample_comparison(0, 0, 1) == 0

    def test_bt_sampler_frequency(self):
        u = UtilityMatrix(((0.5, 0.5),))
        oracle = PreferenceOracle.bradley_terry(u, np.random.default_rng(7))
        n = 100_000
        wins = sum(oracle.sample_comparison(0, 0, 1) == 0 for _ in range(n))
        assert abs(wins / n - 0.5) <= 4 * math.sqrt(0.25 / n)

    def test_estimate_probs_binomial_ci(self):
        u = UtilityMatrix(((0.8, 0.2),))
        oracle = PreferenceOracle.bradley_terry(u, np.random.default_rng(8))
        n = 100_000
        freq = oracle.estimate_probs(0, n)
        assert abs(freq[0, 1] - 0.8) <= 4 * math.sqrt(0.16 / n)
        assert freq[1, 0] == 1.0 - freq[0, 1]
        assert np.isnan(freq[0, 0]) and np.isnan(freq[1, 1])

    def test_estimate_probs_single_sample(self):
        u = UtilityMatrix(((0.8, 0.2),))
        oracle = PreferenceOracle.bradley_terry(u, np.random.default_rng(9))
        freq = oracle.estimate_probs(0, 1)
        assert freq[0, 1] in (0.0, 1.0)

    def test_estimate_probs_noiseless_zero_one(self):
        u = UtilityMatrix(((0.7, 0.1, 0.2),))
        freq = PreferenceOracle.noiseless(u).estimate_probs(0, 5)
        vals = freq[~np.isnan(freq)]
        assert set(vals.tolist()) <= {0.0, 1.0}
        assert freq[0, 1] == 1.0  # 0.7 beats 0.1

    def test_bt_needs_rng_and_utilities(self):
        u = UtilityMatrix(((0.5, 0.5),))
        with pytest.raises(ValueError):
            PreferenceOracle(BT_LINEAR, utilities=u)
        with pytest.raises(ValueError):
            PreferenceOracle(BT_EXP, rng=np.random.default_rng(0))


def test_win_matrix_csv_has_header():
    matrix = np.array([[np.nan, 0.8], [0.2, np.nan]])
    text = win_matrix_csv(matrix)
    lines = text.strip().splitlines()
    assert lines[0] == ",s_1,s_2"
    assert lines[1].startswith("s_1,")
