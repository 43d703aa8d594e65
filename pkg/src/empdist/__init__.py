"""Numerical laboratory for empirical-measure convergence bounds.

Computable upper bounds on Wasserstein and smooth-dual distances between
an empirical measure and its reference, the matching closed-form rate
formulas, exact transport oracles for validation, seeded samplers
(i.i.d. and contracting Markov chains), and a sweep harness.
"""

from .concentration import (
    azuma_rhs,
    empirical_tail_check,
    tail_bound_iid,
    tail_bound_markov,
)
from .dyadic import (
    DyadicBoundReport,
    choose_depth,
    dyadic_wq_bound,
    holder_decompose,
    level_weight,
    random_holder_function,
    truncation_term,
)
from .fourier import (
    FourierBoundParams,
    FourierBoundReport,
    choose_J_fourier,
    coefficient_variance_check,
    cs_dual_bound,
    holder_constant_ek,
)
from .harness import (
    ExperimentConfig,
    SweepResult,
    default_config,
    emit_outputs,
    fit_loglog_slope,
    run_concentration,
    run_sweep,
    verify_theory_table,
)
from .measures import (
    DiscreteMeasure,
    Domain,
    DyadicCell,
    FrequencyIndex,
    ReferenceMeasure,
    cantor_reference,
    cell_index_array,
    partition,
    uniform_reference,
)
from .samplers import (
    ChainRun,
    IidModel,
    MarkovKernelSpec,
    SeedSpec,
    estimate_contraction,
    four_corners_chain_kernel,
    inverse_doubling_kernel,
    sample_chain,
    sample_iid,
)
from .theory import (
    iid_cs_rate,
    lower_bound_lebesgue,
    markov_cs_rate,
    w1_euclid_rhs,
    wq_inf_rhs,
    wq_large_constant,
    wq_regime,
)
from .transport import (
    TransportResult,
    discretize_reference,
    w1_exact_1d,
    w1_exact_discrete,
    w1_reference_bracket,
)

__all__ = [
    "azuma_rhs",
    "empirical_tail_check",
    "tail_bound_iid",
    "tail_bound_markov",
    "DyadicBoundReport",
    "choose_depth",
    "dyadic_wq_bound",
    "holder_decompose",
    "level_weight",
    "random_holder_function",
    "truncation_term",
    "FourierBoundParams",
    "FourierBoundReport",
    "choose_J_fourier",
    "coefficient_variance_check",
    "cs_dual_bound",
    "holder_constant_ek",
    "ExperimentConfig",
    "SweepResult",
    "default_config",
    "emit_outputs",
    "fit_loglog_slope",
    "run_concentration",
    "run_sweep",
    "verify_theory_table",
    "DiscreteMeasure",
    "Domain",
    "DyadicCell",
    "FrequencyIndex",
    "ReferenceMeasure",
    "cantor_reference",
    "cell_index_array",
    "partition",
    "uniform_reference",
    "ChainRun",
    "IidModel",
    "MarkovKernelSpec",
    "SeedSpec",
    "estimate_contraction",
    "four_corners_chain_kernel",
    "inverse_doubling_kernel",
    "sample_chain",
    "sample_iid",
    "iid_cs_rate",
    "lower_bound_lebesgue",
    "markov_cs_rate",
    "w1_euclid_rhs",
    "wq_inf_rhs",
    "wq_large_constant",
    "wq_regime",
    "TransportResult",
    "discretize_reference",
    "w1_exact_1d",
    "w1_exact_discrete",
    "w1_reference_bracket",
]

__version__ = "0.1.0"
