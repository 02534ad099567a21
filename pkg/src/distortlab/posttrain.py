"""Post-training procedures.

Ordinal algorithms see the world only through a PreferenceOracle -- utilities
are never passed in, so cardinal information cannot leak into them. The
cardinal optimum (the distortion benchmark) is computed separately from the
utility matrix by a factored search over maps and per-representation routes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .core import Instance, PostTrainedModel
from .preferences import NOISELESS, PreferenceOracle, UtilityMatrix
from .rules import _argmax_lowest, borda_winner

# An ordinal post-training algorithm: (instance, pretrained model, oracle,
# seeded rng) -> post-trained model. Registered by name for CLI selection.
PostTrainAlgorithm = Callable[[Instance, PostTrainedModel, PreferenceOracle, object], PostTrainedModel]

DEFAULT_PAIR_BUDGET = 1000


def rlhf_borda(
    instance: Instance,
    pretrained: PostTrainedModel,
    oracle: PreferenceOracle,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> PostTrainedModel:
    """Re-route each representation to the Borda winner of its query district.

    Keeps the pretrained representation map. Districts are the preimages of
    the map; representations no query lands in keep their pretrained routing
    row. Under a noiseless oracle the Borda scores come straight from the
    profile; under a probabilistic oracle each rank term is replaced by the
    empirical win-rate over `pair_budget` comparisons per (query, pair).
    """
    m = instance.m
    rows = list(pretrained.g)
    for z, district in enumerate(instance.reps.preimages(pretrained.phi_index)):
        if not district:
            continue
        if oracle.mode == NOISELESS:
            winner = borda_winner(oracle.profile, district)
        else:
            scores = [0.0] * m
            for q in district:
                for i in range(m):
                    for j in range(i + 1, m):
                        wins = sum(
                            oracle.sample_comparison(q, i, j) == i
                            for _ in range(pair_budget)
                        )
                        rate = wins / pair_budget
                        scores[i] += rate
                        scores[j] += 1.0 - rate
            winner = _argmax_lowest(scores)
        rows[z] = tuple(1 if s == winner else 0 for s in range(m))
    return PostTrainedModel(pretrained.reps, pretrained.phi_index, tuple(rows))


def random_router(instance, pretrained, oracle, rng) -> PostTrainedModel:
    """Null baseline: keep the map, route every representation uniformly at random."""
    m = instance.m
    picks = [int(rng.integers(m)) for _ in range(instance.r)]
    return PostTrainedModel.deterministic(pretrained.reps, pretrained.phi_index, picks, m)


def optimal_posttrain(instance: Instance, utilities: UtilityMatrix):
    """Best deterministic post-trained model and its expected utility.

    Factored search: for each map, each representation independently routes to
    the circuit with the highest summed utility over its preimage, so the cost
    is O(|maps| * n * m) instead of enumerating m**r routers per map. Exact
    when the utilities are rational.
    """
    best_model = None
    best_total = None
    for phi_index in range(instance.reps.phi_count):
        picks = []
        total = 0
        for district in instance.reps.preimages(phi_index):
            sums = [sum(utilities.values[q][s] for q in district) for s in range(instance.m)]
            pick = _argmax_lowest(sums)
            picks.append(pick)
            total += sums[pick]
        if best_total is None or total > best_total:
            best_total = total
            best_model = PostTrainedModel.deterministic(
                instance.reps, phi_index, picks, instance.m
            )
    if isinstance(best_total, (int, Fraction)):
        value = Fraction(best_total) / instance.n
    else:
        value = best_total / instance.n
    return best_model, value


def _alg_rlhf_borda(instance, pretrained, oracle, rng):
    return rlhf_borda(instance, pretrained, oracle)


ALGORITHMS: dict[str, PostTrainAlgorithm] = {
    "rlhf_borda": _alg_rlhf_borda,
    "random_router": random_router,
}


def get_algorithm(name: str) -> PostTrainAlgorithm:
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise KeyError(
            f"unknown algorithm {name!r}; available: {', '.join(sorted(ALGORITHMS))}"
        ) from None
