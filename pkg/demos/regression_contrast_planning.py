"""Plan a regression-contrast study from contrast-level score blocks.

For linear models the blocks often have closed forms; for a logistic model
they can be approximated once from a large reference draw.  Both paths end
in the same fixed-pool inversion.
"""

import numpy as np

from predpower import ContrastBlocks, DesignInputs, regression_contrast_n
from predpower.sim import glm_reference_blocks

print("Least-squares contrast, two standardized covariates, a = (1, -1):")
print("  score blocks are (2, 2, 2*rho) in this design")
design = DesignInputs(alpha=0.05, target_power=0.8, delta=0.3)
print(f"  {'rho':>5} {'n* (N=500)':>11} {'n* (large N)':>13}")
for rho in (0.0, 0.5, 0.7, 0.9):
    blocks = ContrastBlocks(v_yy=2.0, v_ff=2.0, v_yf=2.0 * rho)
    finite = regression_contrast_n(blocks, 500, design)
    large = regression_contrast_n(blocks, float("inf"), design)
    print(f"  {rho:5.2f} {finite.n_star:11d} {large.n_star:13d}")
print()

print("Logistic contrast on coefficient 1 (odds ratio exp(0.5) ~ 1.65),")
print("classifier surrogate with se = sp = 0.9;")
print("blocks approximated from a 100k-draw reference sample:")
rng = np.random.default_rng(11)
est = glm_reference_blocks(
    "logistic_contrast", {"delta": 0.5, "accuracy": 0.9}, 100_000, rng
)
blocks = ContrastBlocks(v_yy=est.v_yy, v_ff=est.v_ff, v_yf=est.v_yf)
print(
    f"  v_yy = {blocks.v_yy:.3f}, v_ff = {blocks.v_ff:.3f}, "
    f"v_yf = {blocks.v_yf:.3f}"
)
logit_design = DesignInputs(alpha=0.05, target_power=0.8, delta=0.5)
for n_unl in (200, 500, 2000):
    plan = regression_contrast_n(blocks, n_unl, logit_design)
    print(
        f"  N = {n_unl:5d}: n* = {plan.n_star:4d} "
        f"(classical {plan.classical_n}, reduction {plan.reduction_fraction:.1%})"
    )
