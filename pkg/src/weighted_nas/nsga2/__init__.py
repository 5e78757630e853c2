from .engine import (
    GenerationRecord,
    SearchConfig,
    SearchResult,
    evolve,
    select_k_equal_distance,
)
from .hypervolume import hypervolume, nondominated_mask
from .objectives import (
    EQUAL_WEIGHTS,
    Individual,
    ObjectiveVector,
    ObjectiveWeights,
    canonicalize,
    dominates,
)
from .operators import (
    binary_tournament,
    cut_and_swap,
    hierarchical_mutation,
    single_point_crossover,
    tournament_select,
)
from .sorting import (
    crowded_compare,
    crowding_distances,
    domination_matrix,
    fast_nondominated_sort,
    nondominated_fronts,
    rank_and_crowd,
    weighted_crowding,
)
