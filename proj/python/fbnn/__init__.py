"""Finite-width Bayesian neural networks against their limiting Gaussian processes.

Thin re-export of the compiled core. The C++ library does all the work; this
package exists so the operations can be scripted and inspected from Python.
"""

from fbnn._core import (  # noqa: F401
    Activation,
    BnnSpec,
    ChainDiagnostics,
    ConfigError,
    Dataset,
    DctPlan,
    DeltaSummary,
    FunctionSource,
    GpModel,
    GpPosterior,
    GpPredictive,
    GridSpec,
    IoError,
    KernelFamily,
    KernelSpec,
    LdlGenerator,
    LdlRow,
    LowpassContext,
    LpfForward,
    Manifest,
    MetricRow,
    PairingError,
    PosteriorDraws,
    RandomStream,
    RunConfig,
    SamplerConfig,
    SeedPath,
    SpectrumSummary,
    cmd_fit,
    cmd_gen,
    cmd_report,
    dct_forward,
    dct_inverse,
    dct_plan,
    delta_metrics,
    draw_functions,
    empirical_cdf,
    evaluate_bnn,
    evaluate_nngp,
    forward,
    forward_vjp,
    generate_synthetic_suite,
    gp_fit,
    gp_prior_sample,
    gram,
    kernel_eval,
    ldl_cdf_study,
    load_dataset,
    log_data_likelihood,
    log_joint_and_grad,
    log_likelihood,
    log_prior,
    lowpass_apply,
    lowpass_kept_count,
    lowpass_matrix,
    lpf_forward,
    lpf_gp_dataset,
    lpf_grid_function,
    lpf_log_likelihood,
    make_grid,
    make_lowpass_context,
    nngp_model_select,
    nuts_sample,
    percentile_of_sorted,
    predictive_function_draws,
    sample_bnn_posterior,
    sample_prior_params,
    save_dataset,
    snap_to_grid,
    spectrum_percentiles,
    spectrum_study,
)

__all__ = [name for name in dir() if not name.startswith("_")]
