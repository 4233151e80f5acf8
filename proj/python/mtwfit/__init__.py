"""MTW fading-model fitting toolkit.

Thin wrapper over the C++ core: model evaluation and sampling, empirical
statistics, the four goodness-of-fit criteria, the bounded derivative-free
fitter, and the ergodic-capacity / outage-probability benchmarks.
"""

from ._core import (  # noqa: F401
    THETA_NODES_DEFAULT,
    CdfEstimate,
    Criterion,
    DensityEstimate,
    FitResult,
    NmOptions,
    ParamSet,
    PerfConfig,
    PerfCurve,
    PhysicalParams,
    SampleSet,
    SampleStats,
    SolutionBox,
    __version__,
    cdf,
    db_to_linear,
    ec_empirical,
    ec_model,
    ecdf,
    evaluate_criterion,
    fit,
    kde,
    kld,
    ks_log,
    linear_to_db,
    llm,
    log_cdf_grid,
    log_pdf,
    mse,
    normalize,
    op_empirical,
    op_model,
    operational_snr,
    pdf,
    physical_from_shape,
    prepare_stats,
    rad,
    sample_envelope,
    shape_from_physical,
    sweep_empirical,
    sweep_model,
)
