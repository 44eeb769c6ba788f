"""Configuration-LP approximation for coalitional manipulation of scoring rules."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    ContractError,
    CountConfiguration,
    FractionalSolution,
    ManipulationMatrix,
    ProblemInstance,
    ScoringVector,
    SequenceConfiguration,
    beta_of,
    candidate_final_scores,
    decide_win,
    g_alpha,
    max_nonpreferred_score,
    p_final_score,
    rearrange_to_valid,
)
from .baselines import average_fit, claim1_instance, exact_bruteforce, largest_fit, reverse  # noqa: F401
from .lp import clp_feasible, min_feasible_T, natural_lp_value, separate, solve_lp  # noqa: F401
from .rounding import fix_ucm, fix_wcm, round_best_of, sample_configurations  # noqa: F401
