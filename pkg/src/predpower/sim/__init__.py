"""Monte Carlo validation harness: generators, estimators, and grid runs."""

from .config import DESIGNS, LAMBDA_MODES, OUTCOME_DISTS, SimConfig, SimResult
from .estimators import (
    MeanTestResult,
    crossfit_lambda,
    ppi_pp_test,
    sample_moments,
    two_by_two_test,
    two_sample_test,
)
from .generators import (
    MeanSample,
    RegressionSample,
    TwoGroupSample,
    bvn_cdf,
    generate,
    latent_corr_for_binary,
    paired_binary_diff_moments,
    paired_cont_cov4,
)
from .glm import (
    GlmTestResult,
    crossfit_glm_lambda,
    fit_logistic_mle,
    glm_reference_blocks,
    logistic_contrast_blocks,
    logistic_contrast_test,
    ols_contrast_blocks,
    ols_contrast_test,
    rectified_logistic_solve,
    rectified_ols_solve,
)
from .runner import CSV_COLUMNS, results_to_csv_text, run_experiment, write_csv

__all__ = [
    "DESIGNS",
    "LAMBDA_MODES",
    "OUTCOME_DISTS",
    "SimConfig",
    "SimResult",
    "MeanTestResult",
    "crossfit_lambda",
    "ppi_pp_test",
    "sample_moments",
    "two_by_two_test",
    "two_sample_test",
    "MeanSample",
    "RegressionSample",
    "TwoGroupSample",
    "bvn_cdf",
    "generate",
    "latent_corr_for_binary",
    "paired_binary_diff_moments",
    "paired_cont_cov4",
    "GlmTestResult",
    "crossfit_glm_lambda",
    "fit_logistic_mle",
    "glm_reference_blocks",
    "logistic_contrast_blocks",
    "logistic_contrast_test",
    "ols_contrast_blocks",
    "ols_contrast_test",
    "rectified_logistic_solve",
    "rectified_ols_solve",
    "CSV_COLUMNS",
    "results_to_csv_text",
    "run_experiment",
    "write_csv",
]
