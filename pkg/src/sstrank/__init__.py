"""Top-K selection and Domination testing from noisy pairwise comparisons under SST."""

from .bounds import (
    comb_bound,
    count_bound,
    coup_bound,
    cube_bound,
    max_bound,
    subset_bound,
    topk_bound,
)
from .codec import read_instance, write_instance
from .errors import (
    DomainError,
    EmbeddingError,
    InputShapeError,
    InsufficientSamplesError,
    InvariantError,
    LoadError,
    ParameterError,
    PreconditionError,
    ResourceError,
    SSTRankError,
)
from .generators import (
    HardDraw,
    draw_hard,
    draw_hard_conditioned,
    gen_countingfails,
    gen_countingfails2,
    gen_diag_eps,
    gen_maxfails,
    gen_maxfails2,
)
from .harness import (
    CompetitiveReport,
    RminEstimate,
    SuccessEstimate,
    competitive_report,
    estimate_rmin,
    estimate_success,
    wilson_interval,
)
from .info import (
    InfoReport,
    LowerBound,
    entropy,
    info_pair,
    info_vec,
    kl,
    lb_domination,
    lb_topk,
    sanov_exponent,
)
from .model import (
    DominationInstance,
    Permutation,
    ProbMatrix,
    TopKInstance,
    domination_from_topk,
    embed_domination,
    sst_from_scores,
    validate_sst,
)
from .oracles import (
    Pmf,
    bayes_decide,
    exact_mutual_information,
    exact_success_bayes,
    exact_success_count,
    exact_success_max,
    pmf_coordinate_sum,
)
from .rng import Stream
from .samplers import (
    DominationSamples,
    GroundTruth,
    TopKSamples,
    sample_domination,
    sample_topk,
)
from .solvers import (
    SolverOutput,
    solve_comb,
    solve_count,
    solve_coup,
    solve_cube,
    solve_max,
    solve_subset_count,
)
from .topk import TournamentStats, reduction_lowerbound, solve_topk, tournament_select

__version__ = "0.1.0"
