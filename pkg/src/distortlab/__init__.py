"""distortlab: a desk-scale laboratory for measuring how ordinal preference
data limits outcome-based post-training of query-routing models."""

from .adversary import (
    AdversaryParams,
    BinningReport,
    GroupingStats,
    RunReport,
    adversarial_game,
    bin_top_profile,
    bt_utilities,
    find_good_binning,
    pigeonhole_index,
    suggest_bin_count,
    tiebreak_value,
    unitsum_utilities,
)
from .core import (
    CircuitSet,
    DimensionMismatchError,
    EnumerationLimitError,
    Instance,
    PostTrainedModel,
    QuerySet,
    RepresentationFamily,
    enumerate_deterministic_models,
    expected_utility,
    instance_from_text,
    instance_to_text,
    respond,
)
from .distortion import (
    DistortionResult,
    SizeCapError,
    distortion_ratio,
    evaluate_rule_distortion,
    grid_profile_distortion,
    worst_case_profile_distortion,
)
from .posttrain import ALGORITHMS, get_algorithm, optimal_posttrain, random_router, rlhf_borda
from .preferences import (
    DegenerateComparisonError,
    PreferenceOracle,
    PreferenceProfile,
    TieError,
    UtilityMatrix,
    bt_exp_prob,
    bt_linear_prob,
    derive_profile,
)
from .rules import (
    BordaTally,
    EmptyGroupError,
    borda_scores,
    borda_winner,
    plurality_winner,
    random_dictator,
    range_winner,
)

__version__ = "0.1.0"
