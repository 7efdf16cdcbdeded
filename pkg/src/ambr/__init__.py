"""Budgeted Minimum Bayes-Risk decoding.

Adaptive MBR (correlated sequential halving over candidates) plus the usual
baselines, all running against pluggable utility oracles that count every
unique pairwise evaluation.
"""

from .core import (AmbrError, BudgetExhausted, EmptyReferenceSet, EvalLedger,
                   IndexOutOfRange, Instance, SchemaError, Selection, SelfPair,
                   UtilityOracle, make_rng, mean_utility)
from .algorithms import (CbpConfig, ambr, ambr_replace, cbp, coarse_to_fine,
                         doubling_trick, exact_mbr, medoid, nbys,
                         reference_aggregation, reward_mbr)
from .metrics import (make_oracle, matrix_oracle, rouge_l_f1, sentence_bleu,
                      tokenize, unigram_f1, vector_utility)

__version__ = "0.1.0"
