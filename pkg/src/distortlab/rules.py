"""Voting rules over a group of queries (an "electoral district").

Borda is the proxy for preference-based post-training; plurality and random
dictatorship are classical ordinal baselines; range voting is the cardinal
contrast point that a verifier-driven optimizer would reach. Ties break toward
the lowest circuit index everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .preferences import PreferenceProfile, UtilityMatrix


class EmptyGroupError(ValueError):
    """A voting rule was applied to an empty query group."""


def _check_group(group, n) -> tuple[int, ...]:
    ids = tuple(group)
    if not ids:
        raise EmptyGroupError("query group is empty")
    if any(not (0 <= q < n) for q in ids):
        raise ValueError("query id outside the profile")
    return ids


def _argmax_lowest(scores) -> int:
    best = 0
    for j in range(1, len(scores)):
        if scores[j] > scores[best]:
            best = j
    return best


@dataclass(frozen=True)
class BordaTally:
    """Total Borda score per circuit over one query group."""

    scores: tuple[int, ...]
    group_size: int

    def __post_init__(self):
        m = len(self.scores)
        expected = self.group_size * m * (m - 1) // 2
        if sum(self.scores) != expected:
            raise ValueError(
                f"Borda totals sum to {sum(self.scores)}, expected {expected}"
            )

    @property
    def winner(self) -> int:
        return _argmax_lowest(self.scores)


def borda_scores(profile: PreferenceProfile, group) -> BordaTally:
    """tally[s] = sum over the group of (m - rank of s), rank 1-based."""
    ids = _check_group(group, profile.n)
    m = profile.m
    scores = [0] * m
    for q in ids:
        for pos, s in enumerate(profile.rankings[q]):
            scores[s] += m - 1 - pos
    return BordaTally(tuple(scores), len(ids))


def borda_winner(profile: PreferenceProfile, group) -> int:
    return borda_scores(profile, group).winner


def plurality_winner(profile: PreferenceProfile, group) -> int:
    """Most first-place votes."""
    ids = _check_group(group, profile.n)
    counts = [0] * profile.m
    for q in ids:
        counts[profile.top(q)] += 1
    return _argmax_lowest(counts)


def range_winner(utilities: UtilityMatrix, group) -> int:
    """Circuit with the highest summed utility over the group."""
    ids = _check_group(group, utilities.n)
    totals = [sum(utilities.values[q][s] for q in ids) for s in range(utilities.m)]
    return _argmax_lowest(totals)


def random_dictator(profile: PreferenceProfile, group, rng) -> int:
    """Top choice of a uniformly drawn group member."""
    ids = sorted(_check_group(group, profile.n))
    return profile.top(ids[int(rng.integers(len(ids)))])
