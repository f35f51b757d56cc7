"""Count queries over finite-alphabet sequence data with zero leakage about
designated sensitive positions.

The library builds per-user and aggregate release mechanisms whose outputs
are statistically independent of the sensitive loci, evaluates their exact
error in closed form, bounds what any such mechanism could achieve, audits
arbitrary release tables for leakage, and benchmarks everything against
differential-privacy baselines.
"""

from .core import DNA, Alphabet, CapacityError, LocusSet, Query, ValidationError
from .models import (
    MarkovChainModel,
    TabularModel,
    conditional_prob,
    fit_tabular,
    joint_prob,
    mismatch_prob,
    sample_sequence,
)
from .datasets import HmmGeneratorConfig, hmm_generate, load_dataset, save_dataset
from .entropy import binary_entropy, inverse_binary_entropy
from .local import (
    ErrorReport,
    LocalMechanism,
    aggregate_eae_iid,
    build_mechanism,
    error_probabilities,
    lower_bound,
    release,
    release_batch,
    true_answer,
    true_answer_batch,
)
from .central import (
    AggregateDistribution,
    CentralChannel,
    aggregate_distribution,
    build_central_channel,
    central_expected_error,
    central_release,
    compare_central_closed_forms,
    conditional_aggregate,
    poisson_binomial,
)
from .dp import (
    epsilon_for_target_error,
    laplace_count_release,
    laplace_eae,
    ldp_count_mse,
    randomized_response,
    rr_error_prob,
)
from .audit import AuditReport, audit_central, audit_empirical, audit_local
from .harness import (
    ExperimentPlan,
    ResultRow,
    Scenario,
    dp_frontier_match,
    mask_and_sample_baseline,
    overlap_sweep,
    parse_plan,
    run_plan,
)

__version__ = "0.1.0"
