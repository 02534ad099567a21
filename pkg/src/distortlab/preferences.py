"""Ordinal preference data over circuits: utility matrices, strict per-query
rankings, and pairwise-comparison oracles (noiseless and Bradley-Terry).

Indexing convention: queries and circuits are 0-based everywhere in this
package. Ranks, where they appear as numbers, are 1-based (rank 1 = most
preferred), matching the usual "first place" reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Utility values may be int, float, or Fraction. Fractions propagate through
# all pure-Python arithmetic here, which keeps downstream expected-utility and
# distortion computations exact.
Scalar = int | float | Fraction

UNIT_SUM_TOL = 1e-12

NOISELESS = "noiseless"
BT_LINEAR = "bt-linear"
BT_EXP = "bt-exp"
ORACLE_MODES = (NOISELESS, BT_LINEAR, BT_EXP)


class TieError(ValueError):
    """Two circuits share the same utility within a query row."""

    def __init__(self, query: int, i: int, j: int):
        self.query = query
        self.pair = (i, j)
        super().__init__(
            f"utilities tie at query {query} between circuits {i} and {j}; "
            "strict rankings require tie-free rows"
        )


class DegenerateComparisonError(ValueError):
    """Linear Bradley-Terry comparison where both utilities are zero."""


@dataclass(frozen=True)
class UtilityMatrix:
    """n x m matrix of nonnegative utilities u(query, circuit).

    unit_sum asserts every row sums to 1 (within 1e-12); bounded01 asserts all
    entries lie in [0, 1].
    """

    values: tuple[tuple[Scalar, ...], ...]
    unit_sum: bool = False
    bounded01: bool = False

    def __post_init__(self):
        if not self.values:
            raise ValueError("utility matrix needs at least one row")
        m = len(self.values[0])
        for q, row in enumerate(self.values):
            if len(row) != m:
                raise ValueError(f"ragged utility row {q}")
            for s, u in enumerate(row):
                if u < 0:
                    raise ValueError(f"negative utility at ({q}, {s})")
            if self.unit_sum and abs(sum(row) - 1) > UNIT_SUM_TOL:
                raise ValueError(f"row {q} sums to {sum(row)}, not 1")
            if self.bounded01 and any(u > 1 for u in row):
                raise ValueError(f"row {q} exceeds the [0, 1] bound")

    @classmethod
    def from_rows(cls, rows, unit_sum=False, bounded01=False) -> "UtilityMatrix":
        return cls(tuple(tuple(row) for row in rows), unit_sum, bounded01)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0])

    def row(self, q: int) -> tuple[Scalar, ...]:
        return self.values[q]


@dataclass(frozen=True)
class PreferenceProfile:
    """Strict per-query ranking of circuits.

    rankings[q] is a permutation of circuit ids; position 0 holds query q's
    most-preferred circuit.
    """

    rankings: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rankings:
            raise ValueError("profile needs at least one query")
        m = len(self.rankings[0])
        for q, row in enumerate(self.rankings):
            if sorted(row) != list(range(m)):
                raise ValueError(f"row {q} is not a permutation of 0..{m - 1}")

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.rankings[0])

    def top(self, q: int) -> int:
        return self.rankings[q][0]

    def rank_of(self, q: int, s: int) -> int:
        """1-based rank of circuit s for query q (1 = most preferred)."""
        return self.rankings[q].index(s) + 1

    def prefers(self, q: int, i: int, j: int) -> bool:
        """True iff query q strictly prefers circuit i to circuit j."""
        row = self.rankings[q]
        return row.index(i) < row.index(j)


def profile_to_text(profile: PreferenceProfile) -> str:
    """Integer-matrix text form: one query per line, ranking best-to-worst."""
    return "\n".join(" ".join(str(s) for s in row) for row in profile.rankings) + "\n"


def profile_from_text(text: str) -> PreferenceProfile:
    rows = [tuple(int(tok) for tok in line.split()) for line in text.splitlines() if line.strip()]
    return PreferenceProfile(tuple(rows))


def derive_profile(utilities: UtilityMatrix) -> PreferenceProfile:
    """Rank circuits by strictly decreasing utility, per query.

    Raises TieError on the first within-row tie; the ordinal model is defined
    only for strict comparisons.
    """
    rankings = []
    for q, row in enumerate(utilities.values):
        order = sorted(range(len(row)), key=lambda s: (-row[s], s))
        for a, b in zip(order, order[1:]):
            if row[a] == row[b]:
                raise TieError(q, min(a, b), max(a, b))
        rankings.append(tuple(order))
    return PreferenceProfile(tuple(rankings))


def bt_linear_prob(u_i: Scalar, u_j: Scalar) -> Scalar:
    """P(i beats j) under Bradley-Terry with the raw utilities as scores.

    Exact (a Fraction) when both inputs are rational. Float inputs evaluate
    the division once, on the larger side, so the complement identity
    p(i,j) + p(j,i) = 1 holds exactly rather than to rounding.
    """
    if u_i < 0 or u_j < 0:
        raise ValueError("linear Bradley-Terry scores must be nonnegative")
    if u_i + u_j == 0:
        raise DegenerateComparisonError("both utilities are zero; win probability undefined")
    if isinstance(u_i, (int, Fraction)) and isinstance(u_j, (int, Fraction)):
        return Fraction(u_i) / (u_i + u_j)
    if u_i < u_j:
        return 1.0 - bt_linear_prob(u_j, u_i)
    return float(u_i) / (float(u_i) + float(u_j))


def bt_exp_prob(u_i: float, u_j: float) -> float:
    """P(i beats j) under Bradley-Terry with exponentiated scores.

    A sigmoid of the score difference: large gaps saturate instead of
    overflowing, and the smaller side mirrors the larger so the complement
    identity is exact.
    """
    d = float(u_i) - float(u_j)
    if d < 0:
        return 1.0 - bt_exp_prob(u_j, u_i)
    return 1.0 / (1.0 + math.exp(-d))


class PreferenceOracle:
    """Answers pairwise comparisons for (query, circuit, circuit) triples.

    Noiseless oracles answer deterministically from a strict profile (derived
    from utilities, or supplied directly when no utilities exist yet).
    Bradley-Terry oracles sample from exact win probabilities, which are also
    exposed directly via exact_prob.

    An oracle with a random source is single-owner; exact_prob is pure.
    """

    def __init__(self, mode: str, utilities=None, profile=None, rng=None):
        if mode not in ORACLE_MODES:
            raise ValueError(f"unknown oracle mode {mode!r}")
        if mode == NOISELESS:
            if profile is None:
                if utilities is None:
                    raise ValueError("noiseless oracle needs utilities or a profile")
                profile = derive_profile(utilities)
            elif utilities is not None and derive_profile(utilities) != profile:
                raise ValueError("profile disagrees with utilities")
        else:
            if utilities is None:
                raise ValueError(f"{mode} oracle needs a backing utility matrix")
            if rng is None:
                raise ValueError(f"{mode} oracle needs a seeded random source")
        self.mode = mode
        self.utilities = utilities
        self.profile = profile
        self._rng = rng

    @classmethod
    def noiseless(cls, utilities: UtilityMatrix) -> "PreferenceOracle":
        return cls(NOISELESS, utilities=utilities)

    @classmethod
    def noiseless_from_profile(cls, profile: PreferenceProfile) -> "PreferenceOracle":
        """Profile-backed oracle carrying no utility information at all."""
        return cls(NOISELESS, profile=profile)

    @classmethod
    def bradley_terry(cls, utilities, rng, mode=BT_LINEAR) -> "PreferenceOracle":
        return cls(mode, utilities=utilities, rng=rng)

    @property
    def m(self) -> int:
        return self.profile.m if self.profile is not None else self.utilities.m

    def exact_prob(self, q: int, i: int, j: int) -> Scalar:
        """Exact probability that i beats j for query q."""
        if i == j:
            raise ValueError("comparison needs two distinct circuits")
        if self.mode == NOISELESS:
            return 1 if self.profile.prefers(q, i, j) else 0
        u_i, u_j = self.utilities.values[q][i], self.utilities.values[q][j]
        if self.mode == BT_LINEAR:
            return bt_linear_prob(u_i, u_j)
        return bt_exp_prob(u_i, u_j)

    def sample_comparison(self, q: int, i: int, j: int) -> int:
        """One comparison outcome: the winning circuit id."""
        p = self.exact_prob(q, i, j)
        if self.mode == NOISELESS:
            return i if p else j
        return i if self._rng.random() < p else j

    def estimate_probs(self, q: int, samples: int) -> np.ndarray:
        """Empirical m x m win-frequency matrix from `samples` draws per pair.

        Entry (i, j) is the fraction of draws in which i beat j; each unordered
        pair is sampled once, so (j, i) = 1 - (i, j). Diagonal is NaN.
        """
        if samples < 1:
            raise ValueError("need at least one sample")
        m = self.m
        freq = np.full((m, m), np.nan)
        for i in range(m):
            for j in range(i + 1, m):
                wins = sum(self.sample_comparison(q, i, j) == i for _ in range(samples))
                freq[i, j] = wins / samples
                freq[j, i] = 1.0 - freq[i, j]
        return freq


def win_matrix_csv(matrix: np.ndarray, labels=None) -> str:
    """CSV text for an empirical win-frequency matrix (header row included)."""
    m = matrix.shape[0]
    labels = list(labels) if labels is not None else [f"s_{i + 1}" for i in range(m)]
    lines = ["," + ",".join(labels)]
    for i in range(m):
        cells = ["" if np.isnan(matrix[i, j]) else repr(float(matrix[i, j])) for j in range(m)]
        lines.append(labels[i] + "," + ",".join(cells))
    return "\n".join(lines) + "\n"
