"""Power analysis and sample-size planning for prediction-powered inference.

Plan how many gold-standard labels a study needs when a large pool of
model-predicted labels is available: closed-form variances and power for
rectified (prediction-powered) estimators across one-sample, two-sample,
paired, 2x2, and regression-contrast designs, calibration of the planning
inputs from common ML accuracy metrics or pilot data, and a Monte Carlo
harness that validates every formula.
"""

from .calibration import (
    BinaryMetrics,
    MomentSet,
    PilotSample,
    calibrate_binary,
    calibrate_continuous,
    estimate_moments,
    plugin_lambda,
)
from .errors import (
    ConfigError,
    DegenerateMomentsError,
    DegenerateMomentsWarning,
    DomainError,
    InfeasiblePlanError,
    PredPowerError,
    SingularSystemError,
    UnattainablePowerError,
)
from .power import (
    PlanResult,
    classical_n,
    classical_power,
    paired_n,
    power_at_variance,
    ppi_pp_n,
    ppi_pp_power,
    regression_contrast_n,
    rule_of_thumb,
    two_by_two_n,
    two_sample_n,
    vanilla_ppi_n,
)
from .statcore import DesignInputs, normal_cdf, normal_quantile, variance_threshold
from .variance import (
    ContrastBlocks,
    SampleBudget,
    TwoByTwoSpec,
    TwoGroupMoments,
    contrast_lambda_star,
    contrast_optimal_variance,
    contrast_variance,
    lambda_star,
    log_or_variance,
    log_rr_variance,
    optimal_variance,
    paired_variance,
    ppi_pp_variance,
    two_sample_variance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BinaryMetrics",
    "MomentSet",
    "PilotSample",
    "calibrate_binary",
    "calibrate_continuous",
    "estimate_moments",
    "plugin_lambda",
    "ConfigError",
    "DegenerateMomentsError",
    "DegenerateMomentsWarning",
    "DomainError",
    "InfeasiblePlanError",
    "PredPowerError",
    "SingularSystemError",
    "UnattainablePowerError",
    "PlanResult",
    "classical_n",
    "classical_power",
    "paired_n",
    "power_at_variance",
    "ppi_pp_n",
    "ppi_pp_power",
    "regression_contrast_n",
    "rule_of_thumb",
    "two_by_two_n",
    "two_sample_n",
    "vanilla_ppi_n",
    "DesignInputs",
    "normal_cdf",
    "normal_quantile",
    "variance_threshold",
    "ContrastBlocks",
    "SampleBudget",
    "TwoByTwoSpec",
    "TwoGroupMoments",
    "contrast_lambda_star",
    "contrast_optimal_variance",
    "contrast_variance",
    "lambda_star",
    "log_or_variance",
    "log_rr_variance",
    "optimal_variance",
    "paired_variance",
    "ppi_pp_variance",
    "two_sample_variance",
]
