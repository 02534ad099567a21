"""The three-query compromise-candidate demonstration.

A world with three queries, three circuits, and a single representation (the
model cannot tell queries apart). The third circuit is everyone's second
choice and collects the highest total utility for 2*alpha < beta, yet Borda --
hence preference-based post-training -- picks the first circuit. Everything
here runs in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import CircuitSet, Instance, QuerySet, RepresentationFamily
from .preferences import PreferenceProfile, UtilityMatrix
from .rules import BordaTally, borda_scores, range_winner

LABELS = ("s_A", "s_B", "s_C")

# The canonical strict rankings of the demonstration (they arise from any
# parameters with 0 < alpha, 0 < beta < 1; degenerate parameter choices keep
# using them so the ordinal side stays fixed while utilities vary).
CANONICAL_RANKINGS = ((0, 2, 1), (0, 2, 1), (1, 2, 0))


def compromise_utilities(alpha, beta) -> UtilityMatrix:
    a, b = Fraction(alpha), Fraction(beta)
    return UtilityMatrix(
        (
            (Fraction(1), Fraction(0), 1 - a),
            (Fraction(1), Fraction(0), 1 - a),
            (Fraction(0), Fraction(1), b),
        )
    )


def compromise_instance(alpha, beta) -> Instance:
    return Instance(
        queries=QuerySet(3),
        circuits=CircuitSet(LABELS),
        reps=RepresentationFamily.constant(3),
        utilities=compromise_utilities(alpha, beta),
    )


def compromise_profile() -> PreferenceProfile:
    return PreferenceProfile(CANONICAL_RANKINGS)


@dataclass(frozen=True)
class CompromiseReport:
    alpha: Fraction
    beta: Fraction
    condition_holds: bool  # 2*alpha < beta
    utilities: UtilityMatrix
    tally: BordaTally
    borda_winner: int
    optimum: int
    totals: tuple[Fraction, ...]
    distortion: Fraction


def compromise_report(alpha, beta) -> CompromiseReport:
    """Borda outcome vs cardinal optimum for one (alpha, beta), all exact."""
    a, b = Fraction(alpha), Fraction(beta)
    utilities = compromise_utilities(a, b)
    profile = compromise_profile()
    group = range(3)
    tally = borda_scores(profile, group)
    winner = tally.winner
    optimum = range_winner(utilities, group)
    totals = tuple(
        sum(utilities.values[q][s] for q in group) for s in range(3)
    )
    return CompromiseReport(
        alpha=a,
        beta=b,
        condition_holds=2 * a < b,
        utilities=utilities,
        tally=tally,
        borda_winner=winner,
        optimum=optimum,
        totals=totals,
        distortion=Fraction(totals[optimum]) / totals[winner],
    )
