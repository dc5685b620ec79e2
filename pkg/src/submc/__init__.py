"""Entry-specific submatrix completion under non-uniform sampling."""

from .bounds import (
    BoundReport,
    block_rates,
    bound_report,
    lower_rate,
    precondition_flags,
    upper_rate,
)
from .errors import SubmcError
from .estimator import (
    Estimate,
    RescaledMatrix,
    estimate_all,
    estimate_entry,
    rank_r_approx,
    rescale,
    rescale_with_floor,
    svt_whole,
    truncated_svd,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    build_probability,
    render_outputs,
    run_experiment,
    run_trial,
)
from .sampling import (
    Mask,
    MonotonePermutation,
    ProbabilityMatrix,
    RankOneFactors,
    apply_permutations,
    find_monotone_permutations,
    inverse_permutation,
    is_monotone,
    make_block_P,
    make_rank_one_P,
    sample_beta_mixture_factors,
    sample_mask,
    validate_probability_matrix,
)
from .selector import (
    CoreSubmatrix,
    PlanGroup,
    SubmatrixPlan,
    istar,
    kstar,
    plan_all,
    verify_core_lemma,
)
from .signal import (
    ObservationSet,
    SignalInstance,
    SpectralDiagnostics,
    check_signal_bounded,
    generate_latent_factors,
    make_signal_instance,
    observe,
    signal_matrix,
    spectral_diagnostics,
)

__version__ = "0.1.0"
