from fractions import Fraction

import numpy as np
import pytest

from distortlab.compromise import compromise_instance
from distortlab.core import (
    CircuitSet,
    Instance,
    PostTrainedModel,
    QuerySet,
    RepresentationFamily,
    enumerate_deterministic_models,
    expected_utility,
)
from distortlab.posttrain import (
    ALGORITHMS,
    get_algorithm,
    optimal_posttrain,
    random_router,
    rlhf_borda,
)
from distortlab.preferences import BT_LINEAR, PreferenceOracle, UtilityMatrix

DEMO = compromise_instance(Fraction(1, 10), Fraction(1, 2))


def uniform_pretrained(instance):
    return PostTrainedModel.uniform(instance.reps, 0, instance.m)


def random_rational_instance(rng, n, m, r, phi):
    maps = tuple(tuple(int(z) for z in rng.integers(0, r, size=n)) for _ in range(phi))
    rows = tuple(
        tuple(Fraction(int(x), 97) for x in rng.integers(0, 97, size=m)) for _ in range(n)
    )
    return Instance(
        QuerySet(n), CircuitSet.default(m), RepresentationFamily(r, maps), UtilityMatrix(rows)
    )


class TestRlhfBorda:
    def test_worked_example_routes_to_first(self):
        oracle = PreferenceOracle.noiseless(DEMO.utilities)
        model = rlhf_borda(DEMO, uniform_pretrained(DEMO), oracle)
        assert model.support(0) == 0
        assert model.phi_index == 0

    def test_split_representation_routes_per_district(self):
        # same utility table, but the map separates {q_0, q_1} from {q_2}
        inst = Instance(
            QuerySet(3),
            CircuitSet(("s_A", "s_B", "s_C")),
            RepresentationFamily(2, ((0, 0, 1),)),
            DEMO.utilities,
        )
        oracle = PreferenceOracle.noiseless(inst.utilities)
        model = rlhf_borda(inst, uniform_pretrained(inst), oracle)
        assert model.support(0) == 0  # district {q_0, q_1}: first circuit
        assert model.support(1) == 1  # district {q_2}: second circuit

    def test_unanimous_rankings_route_to_common_top(self):
        u = UtilityMatrix(((0.1, 0.8, 0.3), (0.2, 0.9, 0.4)))
        inst = Instance(
            QuerySet(2), CircuitSet.default(3), RepresentationFamily.constant(2), u
        )
        model = rlhf_borda(inst, uniform_pretrained(inst), PreferenceOracle.noiseless(u))
        assert model.support(0) == 1

    def test_empty_district_keeps_pretrained_row(self):
        u = UtilityMatrix(((0.9, 0.1), (0.8, 0.2)))
        inst = Instance(
            QuerySet(2), CircuitSet.default(2), RepresentationFamily(2, ((0, 0),)), u
        )
        pre = uniform_pretrained(inst)
        model = rlhf_borda(inst, pre, PreferenceOracle.noiseless(u))
        assert model.g[1] == pre.g[1]  # no query maps to rep 1
        assert model.support(0) == 0

    def test_deterministic_given_noiseless_oracle(self):
        oracle = PreferenceOracle.noiseless(DEMO.utilities)
        a = rlhf_borda(DEMO, uniform_pretrained(DEMO), oracle)
        b = rlhf_borda(DEMO, uniform_pretrained(DEMO), oracle)
        assert a == b

    def test_probabilistic_oracle_with_budget_matches_noiseless(self):
        # strongly separated utilities: empirical win-rate Borda agrees with
        # the profile Borda at a modest budget
        u = UtilityMatrix(((0.9, 0.06, 0.04), (0.8, 0.15, 0.05), (0.85, 0.1, 0.05)))
        inst = Instance(
            QuerySet(3), CircuitSet.default(3), RepresentationFamily.constant(3), u
        )
        oracle = PreferenceOracle.bradley_terry(u, np.random.default_rng(17), BT_LINEAR)
        model = rlhf_borda(inst, uniform_pretrained(inst), oracle, pair_budget=300)
        noiseless = rlhf_borda(inst, uniform_pretrained(inst), PreferenceOracle.noiseless(u))
        assert model.support(0) == noiseless.support(0) == 0

    def test_signature_excludes_utilities(self):
        import inspect

        params = inspect.signature(rlhf_borda).parameters
        assert "utilities" not in params  # cardinal data cannot be passed in


class TestOptimalPosttrain:
    def test_worked_example_value(self):
        model, value = optimal_posttrain(DEMO, DEMO.utilities)
        assert model.support(0) == 2
        assert value == Fraction(23, 30)

    def test_dominant_column(self):
        u = UtilityMatrix(((0.2, 0.9, 0.1), (0.3, 0.8, 0.2), (0.1, 0.7, 0.0)))
        inst = Instance(
            QuerySet(3), CircuitSet.default(3), RepresentationFamily(2, ((0, 1, 0),)), u
        )
        model, _ = optimal_posttrain(inst, u)
        assert model.support(0) == 1 and model.support(1) == 1

    def test_matches_enumeration_on_random_instances(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            inst = random_rational_instance(rng, n=8, m=3, r=2, phi=2)
            _, value = optimal_posttrain(inst, inst.utilities)
            brute = max(
                expected_utility(inst, inst.utilities, mdl)
                for mdl in enumerate_deterministic_models(inst)
            )
            assert value == brute

    def test_dominates_borda_router(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            inst = random_rational_instance(rng, n=9, m=4, r=2, phi=2)
            try:
                profile_oracle = PreferenceOracle.noiseless(inst.utilities)
            except Exception:
                continue  # tie rows are fine to skip; dominance is the point
            model = rlhf_borda(inst, uniform_pretrained(inst), profile_oracle)
            _, value = optimal_posttrain(inst, inst.utilities)
            assert value >= expected_utility(inst, inst.utilities, model)

    def test_picks_best_map(self):
        # map 1 separates the two queries and can reach utility 1
        u = UtilityMatrix(((1, 0), (0, 1)))
        inst = Instance(
            QuerySet(2),
            CircuitSet.default(2),
            RepresentationFamily(2, ((0, 0), (0, 1))),
            u,
        )
        model, value = optimal_posttrain(inst, u)
        assert model.phi_index == 1
        assert value == 1


class TestRandomRouter:
    def test_single_representation_uniform_frequencies(self):
        inst = Instance(QuerySet(4), CircuitSet.default(4), RepresentationFamily.constant(4))
        pre = uniform_pretrained(inst)
        rng = np.random.default_rng(41)
        counts = [0] * 4
        trials = 10_000
        for _ in range(trials):
            counts[random_router(inst, pre, None, rng).support(0)] += 1
        import math

        margin = 4 * math.sqrt(0.25 * 0.75 / trials)
        for c in counts:
            assert abs(c / trials - 0.25) <= margin

    def test_fixed_seed_reproducible(self):
        inst = Instance(QuerySet(3), CircuitSet.default(5), RepresentationFamily.constant(3))
        pre = uniform_pretrained(inst)
        a = random_router(inst, pre, None, np.random.default_rng(9))
        b = random_router(inst, pre, None, np.random.default_rng(9))
        assert a == b


def test_algorithm_registry():
    assert set(ALGORITHMS) == {"rlhf_borda", "random_router"}
    assert get_algorithm("rlhf_borda") is ALGORITHMS["rlhf_borda"]
    with pytest.raises(KeyError):
        get_algorithm("gradient_descent")
