"""Coherence analysis of DCG and learning of its gains and discounts from preferences."""

from .coherence import CoherenceVerdict, check_coherence, find_counterexample_exponent, verify_binary_coherence
from .decomposition import (
    RankOneFactors,
    hamming,
    precision,
    rank_one_factorize,
    similarity,
    t_transform,
    weight_matrix,
)
from .encoding import UtilityVector, case_one_weights, decode, encode, encode_grade_free, utility
from .learner import FitConfig, PreferencePair, fit, isotonic_project, label_pair, solve
from .ranking import GradeScale, apply_power_transform, dcg, default_discounts, is_compatible, optimal_ranking
from .simulation import ExperimentConfig, GroundTruthSpec, make_ground_truth, run_experiment

__version__ = "0.1.0"
