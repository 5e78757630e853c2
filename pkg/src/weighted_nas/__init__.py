"""Hardware-aware architecture search with a weighted NSGA-II."""

from .evaluator import SyntheticEvaluator, TableEvaluator, synthetic_evaluate
from .latency import LatencyTable, latency_rmse, load_table, predict_latency, save_table, synthetic_table
from .model_stats import ModelStats, count_madds, count_params, model_stats
from .search_space import (
    MOGA_A,
    MOGA_B,
    MOGA_C,
    ArchitectureSpec,
    BlockChoice,
    choice_of_index,
    decode_architecture,
    diversity_init,
    format_chromosome,
    index_of_choice,
    parse_chromosome,
    random_chromosome,
)

__version__ = "0.1.0"
