from .baselines import (BudgetTooSmall, MissingRewards, coarse_to_fine, exact_mbr,
                        full_pool_scores, nbys, reference_aggregation, reward_mbr)
from .cbp import CbpConfig, cbp, win_ratios
from .halving import ambr, ambr_replace, doubling_trick, medoid, n_rounds

__all__ = [
    "BudgetTooSmall", "MissingRewards", "CbpConfig",
    "exact_mbr", "full_pool_scores", "nbys", "coarse_to_fine", "reference_aggregation",
    "reward_mbr", "cbp", "win_ratios", "ambr", "ambr_replace", "doubling_trick",
    "medoid", "n_rounds",
]
