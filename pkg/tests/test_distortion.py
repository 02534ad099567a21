import math
from fractions import Fraction

import numpy as np
import pytest

from distortlab.compromise import compromise_instance, compromise_profile
from distortlab.core import (
    CircuitSet,
    Instance,
    PostTrainedModel,
    QuerySet,
    RepresentationFamily,
)
from distortlab.distortion import (
    SizeCapError,
    distortion_ratio,
    evaluate_rule_distortion,
    grid_profile_distortion,
    solve_lp_max,
    worst_case_profile_distortion,
)
from distortlab.posttrain import rlhf_borda
from distortlab.preferences import PreferenceOracle, PreferenceProfile, UtilityMatrix, derive_profile
from distortlab.rules import borda_winner

DEMO = compromise_instance(Fraction(1, 10), Fraction(1, 2))


class TestSimplex:
    def test_random_lps_match_scipy(self):
        linprog = pytest.importorskip("scipy.optimize").linprog
        from distortlab.distortion import LPInfeasibleError

        rng = np.random.default_rng(123)
        for trial in range(120):
            nvar = int(rng.integers(1, 6))
            nub = int(rng.integers(0, 5))
            neq = int(rng.integers(0, 3))
            c = [Fraction(int(x), 7) for x in rng.integers(-20, 21, nvar)]
            a_ub = [[Fraction(int(x), 3) for x in rng.integers(-6, 7, nvar)] for _ in range(nub)]
            b_ub = [Fraction(int(x), 2) for x in rng.integers(-4, 15, nub)]
            a_eq = [[Fraction(int(x), 3) for x in rng.integers(-6, 7, nvar)] for _ in range(neq)]
            b_eq = [Fraction(int(x), 2) for x in rng.integers(0, 10, neq)]
            a_ub.append([Fraction(1)] * nvar)  # keep the maximum finite
            b_ub.append(Fraction(10))
            reference = linprog(
                [-float(x) for x in c],
                A_ub=[[float(v) for v in row] for row in a_ub],
                b_ub=[float(v) for v in b_ub],
                A_eq=[[float(v) for v in row] for row in a_eq] or None,
                b_eq=[float(v) for v in b_eq] or None,
                bounds=[(0, None)] * nvar,
                method="highs",
            )
            try:
                value, x = solve_lp_max(c, a_ub, b_ub, a_eq, b_eq)
            except LPInfeasibleError:
                assert reference.status == 2, trial
                continue
            assert reference.status == 0, trial
            assert abs(float(value) - (-reference.fun)) < 1e-7, trial
            for row, b in zip(a_ub, b_ub):  # exact feasibility of our point
                assert sum(r * v for r, v in zip(row, x)) <= b
            for row, b in zip(a_eq, b_eq):
                assert sum(r * v for r, v in zip(row, x)) == b

    def test_textbook_maximum(self):
        # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        value, x = solve_lp_max(
            [3, 5],
            [[1, 0], [0, 2], [3, 2]],
            [4, 12, 18],
            [],
            [],
        )
        assert value == 36
        assert x == [2, 6]

    def test_equality_constraints(self):
        # max x + y s.t. x + y = 1: optimum 1
        value, x = solve_lp_max([1, 1], [], [], [[1, 1]], [1])
        assert value == 1
        assert sum(x) == 1

    def test_infeasible(self):
        from distortlab.distortion import LPInfeasibleError

        with pytest.raises(LPInfeasibleError):
            solve_lp_max([1], [[1]], [-1], [], [])  # x <= -1 with x >= 0

    def test_unbounded(self):
        from distortlab.distortion import LPUnboundedError

        with pytest.raises(LPUnboundedError):
            solve_lp_max([1], [], [], [], [])


class TestDistortionRatio:
    def test_worked_example_borda_model(self):
        oracle = PreferenceOracle.noiseless(DEMO.utilities)
        pre = PostTrainedModel.uniform(DEMO.reps, 0, 3)
        model = rlhf_borda(DEMO, pre, oracle)
        result = distortion_ratio(DEMO, DEMO.utilities, model)
        assert result.value == Fraction(23, 20)
        assert result.optimum == Fraction(23, 30)
        assert result.achieved == Fraction(2, 3)
        assert result.witness.support(0) == 2

    def test_optimal_model_scores_one(self):
        from distortlab.posttrain import optimal_posttrain

        best, _ = optimal_posttrain(DEMO, DEMO.utilities)
        assert distortion_ratio(DEMO, DEMO.utilities, best).value == 1

    def test_zero_utility_route_is_unbounded(self):
        u = UtilityMatrix(((0, 1), (0, 1)))
        inst = Instance(
            QuerySet(2), CircuitSet.default(2), RepresentationFamily.constant(2), u
        )
        model = PostTrainedModel.deterministic(inst.reps, 0, [0], 2)
        result = distortion_ratio(inst, u, model)
        assert result.unbounded and result.value == math.inf

    def test_all_zero_is_degenerate(self):
        u = UtilityMatrix(((0, 0), (0, 0)))
        inst = Instance(
            QuerySet(2), CircuitSet.default(2), RepresentationFamily.constant(2), u
        )
        model = PostTrainedModel.deterministic(inst.reps, 0, [0], 2)
        result = distortion_ratio(inst, u, model)
        assert result.degenerate and result.value == 1


class TestWorstCase:
    def test_single_voter_winner_top(self):
        profile = PreferenceProfile(((0, 1),))
        assert worst_case_profile_distortion(profile, [0], 0).value == 1

    def test_single_voter_winner_bottom_unbounded(self):
        profile = PreferenceProfile(((0, 1),))
        result = worst_case_profile_distortion(profile, [0], 1)
        assert result.unbounded

    def test_two_voter_split_reaches_three(self):
        # one voter per side; winner is somebody's top, so the ratio is finite:
        # (1/2 + 1) / (1/2 + 0) = 3 at the tie limit of the winner's supporter
        profile = PreferenceProfile(((0, 1), (1, 0)))
        result = worst_case_profile_distortion(profile, [0, 1], 0)
        assert result.value == 3
        assert grid_profile_distortion(profile, [0, 1], 0) == 3

    def test_opposed_voters_middle_winner_unbounded(self):
        profile = PreferenceProfile(((0, 1, 2), (2, 1, 0)))
        result = worst_case_profile_distortion(profile, [0, 1], 1)
        assert result.unbounded
        assert grid_profile_distortion(profile, [0, 1], 1) == math.inf

    def test_unanimous_top_winner_is_one(self):
        profile = PreferenceProfile(((1, 0, 2), (1, 2, 0)))
        assert worst_case_profile_distortion(profile, [0, 1], 1).value == 1

    def test_demo_profile_value(self):
        # rows (1/3,1/3,1/3),(1/3,1/3,1/3),(0,1,0) push the second circuit to
        # 5/3 while the winner holds 2/3: ratio 5/2, attained in the closure
        result = worst_case_profile_distortion(compromise_profile(), range(3), 0)
        assert result.value == Fraction(5, 2)
        assert result.witness_candidate == 1

    def test_worst_case_bounds_realized_value(self):
        realized = Fraction(23, 10) / 2  # the alpha=0.1, beta=0.5 instance
        bound = worst_case_profile_distortion(compromise_profile(), range(3), 0).value
        assert bound >= realized

    def test_grid_lower_bounds_lp_on_demo(self):
        lp = worst_case_profile_distortion(compromise_profile(), range(3), 0).value
        grid = grid_profile_distortion(compromise_profile(), range(3), 0)
        assert grid == Fraction(83, 34)  # best 0.01-grid point, derived by search
        assert Fraction(0) <= lp - grid == Fraction(1, 17)

    def test_size_cap(self):
        profile = PreferenceProfile(tuple((0, 1, 2) for _ in range(80)))
        with pytest.raises(SizeCapError):
            worst_case_profile_distortion(profile, range(80), 0)

    def test_worst_dominates_random_realized(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            rows = []
            for _ in range(3):
                while True:
                    row = rng.random(3)
                    if len(set(row.tolist())) == 3:
                        break
                rows.append(tuple(float(x) for x in row / row.sum()))
            u = UtilityMatrix(tuple(rows), unit_sum=True)
            profile = derive_profile(u)
            winner = borda_winner(profile, range(3))
            totals = [sum(u.values[q][s] for q in range(3)) for s in range(3)]
            realized = max(totals) / totals[winner]
            bound = worst_case_profile_distortion(profile, range(3), winner).value
            assert realized <= float(bound) + 1e-9


class TestRuleDistortion:
    def test_single_voter_borda_is_one(self):
        profile = PreferenceProfile(((2, 0, 1),))
        assert evaluate_rule_distortion(profile, [0], "borda").value == 1

    def test_range_rule_on_its_own_utilities_is_optimal(self):
        # with a single district, the range winner is exactly the cardinal
        # optimum, so its realized distortion is 1
        from distortlab.rules import range_winner

        winner = range_winner(DEMO.utilities, range(3))
        model = PostTrainedModel.deterministic(DEMO.reps, 0, [winner], 3)
        assert distortion_ratio(DEMO, DEMO.utilities, model).value == 1

    def test_demo_borda_at_least_realized(self):
        result = evaluate_rule_distortion(compromise_profile(), range(3), "borda")
        assert result.value >= Fraction(23, 20)

    def test_unknown_rule(self):
        with pytest.raises(KeyError):
            evaluate_rule_distortion(compromise_profile(), range(3), "copeland")
