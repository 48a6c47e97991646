"""Top-k ranking from pairwise comparisons.

Simulates the Bradley-Terry-Luce comparison model, recovers rankings by
vanilla maximum likelihood and by the spectral (stationary-distribution)
method, evaluates partial and exact top-k recovery, and reproduces the
phase-transition experiments as CSV sweeps.
"""

__version__ = "0.1.0"

from .errors import (
    DegreeOverflowError,
    DisconnectedGraphError,
    DivergedError,
    NotConvergedError,
    RankingError,
    ReducibleChainError,
)
from .experiments import (
    ExperimentConfig,
    SweepRecord,
    TrialResult,
    load_config,
    make_profile,
    read_sweep_csv,
    run_sweep,
    run_trial,
    write_sweep_csv,
)
from .metrics import (
    EvalReport,
    estimation_errors,
    evaluate,
    exact_recovery,
    hamming_topk,
    kendall_tau,
)
from .mle import (
    FitResult,
    LikelihoodState,
    MleOptions,
    fit_mle,
    gradient,
    hessian,
    neg_log_likelihood,
    topk_threshold_error,
)
from .model import (
    CenteredScores,
    Ranking,
    SkillProfile,
    SpaceKind,
    center,
    ranking_from_scores,
    sigmoid,
    sigmoid_prime,
    validate_profile,
)
from .simulate import (
    ComparisonDataset,
    ComparisonGraph,
    RngSeed,
    design_four_piece_rho,
    design_four_piece_tau,
    design_random_uniform,
    design_two_piece,
    read_dataset,
    sample_comparisons,
    sample_graph,
    write_dataset,
)
from .spectral import (
    StationaryDistribution,
    TransitionMatrix,
    build_transition,
    fit_spectral,
    stationary_distribution,
)
from .theory import (
    ExponentBound,
    TheoryInput,
    VarianceResult,
    exact_recovery_threshold,
    partial_recovery_exponent,
    snr,
    variance_mle,
    variance_spectral,
)
