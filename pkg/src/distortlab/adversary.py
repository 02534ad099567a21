"""Adversarial instance constructions and the two-move game.

The adversary moves first by splitting queries into k bins so evenly that no
representation map can tell the bins apart (randomized binning certified by a
concentration threshold), publishes ordinal data in which each bin favors its
own circuit, lets the algorithm post-train on that data alone, and only then
fixes the cardinal utilities against the returned model: each representation's
starved circuit (the one the router gives mass at most 1/k) becomes the
favorite of one whole bin.

Two utility constructions are provided: a unit-sum one paired with noiseless
preferences (wire name "thm32") and a bounded one paired with a linear
Bradley-Terry oracle at fixed win rate (wire name "thm33").
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .core import Instance, PostTrainedModel
from .distortion import DistortionResult, distortion_ratio
from .preferences import (
    BT_LINEAR,
    PreferenceOracle,
    PreferenceProfile,
    Scalar,
    UtilityMatrix,
)

# Wire names for the two constructions; fixed, part of the config/CSV schema.
VARIANT_UNITSUM = "thm32"
VARIANT_BT = "thm33"
GAME_VARIANTS = (VARIANT_UNITSUM, VARIANT_BT)


@dataclass(frozen=True)
class AdversaryParams:
    """Knobs of one adversarial run.

    k is the bin count (2 <= k <= m at use); epsilon the small utility floor;
    win_rate the Bradley-Terry top-vs-other probability (only the BT variant
    reads it). index_weights switches the rank-weight term of the unit-sum
    construction from preference rank to raw circuit index -- kept only for
    comparison, since it breaks consistency with the published profile.
    """

    k: int
    epsilon: Scalar
    win_rate: Scalar
    seed: int = 0
    max_retries: int = 64
    pilot: int = 16
    index_weights: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("need at least two bins")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not Fraction(1, 2) < self.win_rate < 1:
            raise ValueError("win rate must lie in (1/2, 1)")
        if self.max_retries < 1 or self.pilot < 1:
            raise ValueError("retry and pilot counts must be positive")

    @classmethod
    def defaults(cls, n: int, k: int, **overrides) -> "AdversaryParams":
        """epsilon = 1/n and win_rate = n/(n+1), so n*(eps + (1-R)/R) = 2."""
        values = dict(k=k, epsilon=Fraction(1, n), win_rate=Fraction(n, n + 1))
        values.update(overrides)
        return cls(**values)


def suggest_bin_count(n: int, r: int, phi_count: int, m: int) -> int:
    """Bin count from the concentration budget (all constants 1), capped at floor(sqrt(m))."""
    log_n = math.log(max(n, 2))
    denom = math.sqrt(n * r * log_n) + r * log_n + math.sqrt(n * math.log(max(phi_count, 2)))
    return max(2, min(math.isqrt(m), int(n / denom)))


def tiebreak_value(j: int, m: int) -> Fraction:
    """Strictly decreasing rank weights (2/(m-1)) * (1 - j/m); j is a 1-based rank.

    The m weights sum to exactly 1 and the last is 0, so an epsilon-weighted
    copy can be added to any row without disturbing its total.
    """
    if m < 2:
        raise ValueError("rank weights need at least two circuits")
    if not 1 <= j <= m:
        raise ValueError(f"rank {j} outside 1..{m}")
    return Fraction(2, m - 1) * (1 - Fraction(j, m))


def pigeonhole_index(g_row, k: int) -> int:
    """Index in 0..k-1 whose routing mass is minimal (hence <= 1/k), lowest first."""
    if k > len(g_row):
        raise ValueError("bin count exceeds the circuit count")
    best = 0
    for j in range(1, k):
        if g_row[j] < g_row[best]:
            best = j
    return best


# --- discrepancy binning ----------------------------------------------------


@dataclass(frozen=True)
class GroupingStats:
    """counts[i][z]: queries in bin i whose representation is z, for one map."""

    counts: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    @classmethod
    def from_assignment(cls, phi_map, assignment, k, r) -> "GroupingStats":
        counts = [[0] * r for _ in range(k)]
        for q, z in enumerate(phi_map):
            counts[assignment[q]][z] += 1
        return cls(tuple(tuple(row) for row in counts))


def map_bin_counts(phi_map: np.ndarray, assignment: np.ndarray, k: int, r: int) -> np.ndarray:
    """r x k table: entry (z, j) counts queries with representation z in bin j."""
    idx = phi_map * k + assignment
    return np.bincount(idx, minlength=r * k).reshape(r, k)


def discrepancy_sums(rep_arrays, assignment, k, r):
    """Per map: (sum over reps of its fullest bin, sum over reps of its emptiest bin)."""
    sums = []
    for phi in rep_arrays:
        counts = map_bin_counts(phi, assignment, k, r)
        sums.append((int(counts.max(axis=1).sum()), int(counts.min(axis=1).sum())))
    return sums


def certification_threshold(n: int, phi_count: int, r: int) -> float:
    """Concentration allowance around the pilot means: sqrt(n * ln(2 * |maps| * r))."""
    return math.sqrt(n * math.log(2 * phi_count * r))


@dataclass(frozen=True)
class BinningReport:
    """A query-to-bin assignment with its discrepancy certificate.

    counts[a][z][j] holds the (map a, representation z, bin j) cell counts;
    sum_max / sum_min are the per-map discrepancy sums; certified says the
    accepted assignment passed the pilot-mean +/- threshold test.
    """

    assignment: tuple[int, ...]
    k: int
    counts: tuple[tuple[tuple[int, ...], ...], ...]
    sum_max: tuple[int, ...]
    sum_min: tuple[int, ...]
    threshold: float
    mu_max: float
    mu_min: float
    retries: int
    certified: bool

    def group(self, i: int) -> tuple[int, ...]:
        return tuple(q for q, b in enumerate(self.assignment) if b == i)


def find_good_binning(reps, n: int, k: int, params: AdversaryParams) -> BinningReport:
    """Randomized search for an assignment every map splits nearly evenly.

    A pilot batch estimates the mean discrepancy sums; a fresh assignment is
    accepted once every map's fullest-bin sum is at most the worst pilot mean
    plus t and its emptiest-bin sum at least the best pilot mean minus t,
    where t = sqrt(n * ln(2 * |maps| * r)). The probabilistic method makes
    acceptance overwhelmingly likely; after max_retries the least-lopsided
    candidate is returned flagged as non-certified.

    k = 1 is allowed here (it makes every sum equal n and certifies trivially)
    so degenerate single-district setups remain testable.
    """
    if k < 1:
        raise ValueError("need at least one bin")
    rng = np.random.default_rng(params.seed)
    rep_arrays = [np.asarray(phi, dtype=np.int64) for phi in reps.maps]
    t = certification_threshold(n, reps.phi_count, reps.r)

    pilot_max = np.zeros((params.pilot, reps.phi_count))
    pilot_min = np.zeros((params.pilot, reps.phi_count))
    for i in range(params.pilot):
        assignment = rng.integers(0, k, size=n)
        for a, (smax, smin) in enumerate(discrepancy_sums(rep_arrays, assignment, k, reps.r)):
            pilot_max[i, a] = smax
            pilot_min[i, a] = smin
    mu_max = float(pilot_max.mean(axis=0).max())
    mu_min = float(pilot_min.mean(axis=0).min())

    best = None  # (worst sum_max, assignment, sums)
    retries = 0
    for _ in range(params.max_retries):
        retries += 1
        assignment = rng.integers(0, k, size=n)
        sums = discrepancy_sums(rep_arrays, assignment, k, reps.r)
        if all(smax <= mu_max + t and smin >= mu_min - t for smax, smin in sums):
            return _binning_report(
                assignment, k, rep_arrays, reps.r, sums, t, mu_max, mu_min, retries, True
            )
        worst = max(smax for smax, _ in sums)
        if best is None or worst < best[0]:
            best = (worst, assignment, sums)
    _, assignment, sums = best
    return _binning_report(
        assignment, k, rep_arrays, reps.r, sums, t, mu_max, mu_min, retries, False
    )


def _binning_report(assignment, k, rep_arrays, r, sums, t, mu_max, mu_min, retries, certified):
    counts = tuple(
        tuple(tuple(int(c) for c in row) for row in map_bin_counts(phi, assignment, k, r))
        for phi in rep_arrays
    )
    return BinningReport(
        assignment=tuple(int(b) for b in assignment),
        k=k,
        counts=counts,
        sum_max=tuple(s for s, _ in sums),
        sum_min=tuple(s for _, s in sums),
        threshold=t,
        mu_max=mu_max,
        mu_min=mu_min,
        retries=retries,
        certified=certified,
    )


# --- ordinal data the algorithm sees ----------------------------------------


def bin_top_profile(binning: BinningReport, m: int) -> PreferenceProfile:
    """Each query ranks its bin's circuit first, then all others by ascending index."""
    if binning.k > m:
        raise ValueError("bin count exceeds the circuit count")
    row_for_bin = [
        (b, *(j for j in range(m) if j != b)) for b in range(binning.k)
    ]
    return PreferenceProfile(tuple(row_for_bin[b] for b in binning.assignment))


def bt_scaffold_utilities(binning: BinningReport, m: int, win_rate) -> UtilityMatrix:
    """Row shapes behind the Bradley-Terry oracle: top scores 1, others (1-R)/R.

    Only utility ratios reach the oracle, and the later per-query rescaling
    against the returned model preserves every ratio, so comparisons drawn
    from this scaffold are already distributed exactly as under the final
    utilities: the bin favorite wins with probability R, and the remaining
    circuits (all sharing one score) tie at 1/2.
    """
    if binning.k > m:
        raise ValueError("bin count exceeds the circuit count")
    low = (1 - win_rate) / win_rate
    rows = tuple(
        tuple(1 if s == b else low for s in range(m)) for b in binning.assignment
    )
    return UtilityMatrix(rows, bounded01=True)


# --- cardinal utilities fixed against the returned model ---------------------


def unitsum_utilities(
    model: PostTrainedModel,
    binning: BinningReport,
    epsilon,
    index_weights: bool = False,
) -> UtilityMatrix:
    """Unit-sum utilities that starve the returned router.

    Per representation z, let i_z be the pigeonhole (minimal-mass) index of
    the router row. Queries of z sitting in bin i_z score (1 - eps) on circuit
    s_{i_z} alone; queries of z in other bins score a flat (1 - eps)/m. Both
    get an eps-weighted rank-weight term on top, which keeps every row's order
    identical to the published profile and every row sum exactly 1.

    index_weights applies the rank-weight formula to the raw circuit index
    instead; row sums survive but mismatched rows then order circuits by index,
    contradicting the published profile (kept for comparison only).
    """
    m = model.m
    profile = bin_top_profile(binning, m)
    flat = (1 - epsilon) * Fraction(1, m) if isinstance(epsilon, (int, Fraction)) else (1 - epsilon) / m
    rows = []
    for q, b in enumerate(binning.assignment):
        z = model.phi(q)
        i_z = pigeonhole_index(model.g[z], binning.k)
        ranking = profile.rankings[q]
        row = [None] * m
        for pos, s in enumerate(ranking):
            j = (s + 1) if index_weights else (pos + 1)
            bump = epsilon * tiebreak_value(j, m)
            if b == i_z:
                row[s] = (1 - epsilon) * (1 if s == i_z else 0) + bump
            else:
                row[s] = flat + bump
        rows.append(tuple(row))
    return UtilityMatrix(tuple(rows), unit_sum=True, bounded01=True)


def bt_utilities(
    model: PostTrainedModel,
    binning: BinningReport,
    epsilon,
    win_rate,
    rng,
) -> tuple[UtilityMatrix, PreferenceOracle]:
    """Bounded utilities plus the linear Bradley-Terry oracle over them.

    Same pigeonhole move as the unit-sum construction, expressed through row
    scale instead of shape: every query keeps the scaffold shape (top 1,
    others (1-R)/R), matched queries at full scale, mismatched ones shrunk to
    epsilon. Rows need not sum to 1; they stay within [0, 1].
    """
    m = model.m
    low = (1 - win_rate) / win_rate
    rows = []
    for q, b in enumerate(binning.assignment):
        z = model.phi(q)
        i_z = pigeonhole_index(model.g[z], binning.k)
        scale = 1 if b == i_z else epsilon
        rows.append(tuple(scale * (1 if s == b else low) for s in range(m)))
    utilities = UtilityMatrix(tuple(rows), bounded01=True)
    return utilities, PreferenceOracle.bradley_terry(utilities, rng, BT_LINEAR)


def matched_total(model: PostTrainedModel, binning: BinningReport) -> int:
    """Sum over representations z of n_{i_z, z}: queries sitting in the bin
    their representation's pigeonhole index points to."""
    total = 0
    for z, district in enumerate(model.reps.preimages(model.phi_index)):
        if not district:
            continue
        i_z = pigeonhole_index(model.g[z], binning.k)
        total += sum(1 for q in district if binning.assignment[q] == i_z)
    return total


def unitsum_bounds(n, m, k, epsilon, matched):
    """(upper bound on n * algorithm utility, lower bound on n * optimum)."""
    upper = Fraction(n, m) + Fraction(m - 1, k * m) * matched + n * Fraction(epsilon)
    lower = (1 - Fraction(epsilon)) * matched
    return upper, lower


def bt_bounds(n, m, k, epsilon, win_rate, matched):
    """Same pair for the Bradley-Terry construction."""
    eps, win = Fraction(epsilon), Fraction(win_rate)
    upper = n * eps + matched * ((1 - win) / win + Fraction(1, k))
    lower = Fraction(matched)
    return upper, lower


# --- the game ----------------------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    """One adversarial-game outcome; maps 1:1 onto a sweep CSV row.

    wall_clock_ms and the audit copy of the constructed world are excluded
    from equality: two runs of the same seed compare equal on substance.
    """

    variant: str
    m: int
    n: int
    r: int
    phi_count: int
    k: int
    epsilon: Scalar
    win_rate: Scalar
    seed: int
    algorithm: str
    certified: bool
    sum_matched: int
    alg_util: Scalar
    opt_util: Scalar
    distortion: Scalar
    wall_clock_ms: float = field(default=0.0, compare=False)
    error: str = ""
    world: Instance | None = field(default=None, compare=False, repr=False)


def adversarial_game(
    algorithm,
    instance: Instance,
    pretrained: PostTrainedModel,
    params: AdversaryParams,
    variant: str,
    algorithm_name: str | None = None,
) -> RunReport:
    """Play one full game and report the realized distortion.

    Order matters: the binning and the ordinal data exist before the algorithm
    runs, and the algorithm sees only the oracle (for the unit-sum variant a
    profile-backed oracle carrying no utilities at all -- they do not exist
    yet). The utilities are constructed afterwards, against the returned
    model, yet remain consistent with everything the algorithm was shown.
    """
    start = time.perf_counter()
    if variant not in GAME_VARIANTS:
        raise ValueError(f"unknown game variant {variant!r}")
    if params.k > instance.m:
        raise ValueError("bin count exceeds the circuit count")

    binning = find_good_binning(instance.reps, instance.n, params.k, params)
    if variant == VARIANT_UNITSUM:
        oracle = PreferenceOracle.noiseless_from_profile(bin_top_profile(binning, instance.m))
    else:
        scaffold = bt_scaffold_utilities(binning, instance.m, params.win_rate)
        oracle = PreferenceOracle.bradley_terry(
            scaffold, np.random.default_rng([params.seed, 2])
        )

    model = algorithm(instance, pretrained, oracle, np.random.default_rng([params.seed, 1]))

    if variant == VARIANT_UNITSUM:
        utilities = unitsum_utilities(model, binning, params.epsilon, params.index_weights)
    else:
        utilities, _ = bt_utilities(
            model, binning, params.epsilon, params.win_rate,
            np.random.default_rng([params.seed, 3]),
        )

    world = replace(instance, utilities=utilities)
    result: DistortionResult = distortion_ratio(world, utilities, model)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return RunReport(
        variant=variant,
        m=instance.m,
        n=instance.n,
        r=instance.r,
        phi_count=instance.reps.phi_count,
        k=params.k,
        epsilon=params.epsilon,
        win_rate=params.win_rate,
        seed=params.seed,
        algorithm=algorithm_name or getattr(algorithm, "__name__", "custom"),
        certified=binning.certified,
        sum_matched=matched_total(model, binning),
        alg_util=result.achieved,
        opt_util=result.optimum,
        distortion=result.value,
        wall_clock_ms=elapsed_ms,
        world=world,
    )
