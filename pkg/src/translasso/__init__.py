"""Transfer learning for high-dimensional sparse linear regression."""
from .aggregate import AggregationResult, estimate_noise_variance, q_aggregate
from .core import FitResult, Study, TaskData, stacked_gram, standardize
from .detect import (CandidateSets, SparsityReport, build_candidate_sets, marginal_stats,
                     sparsity_index, sure_screen)
from .lasso import LassoConfig, cv_lambda, fit_lasso, fit_lasso_quadratic, soft_threshold
from .oracle import OracleConfig, naive_trans_lasso, oracle_trans_lasso, oracle_trans_lasso_l0
from .pipeline import TransLassoConfig, trans_lasso
from .simharness import SimScenario, gen_task, run_replications

__version__ = "0.1.0"
