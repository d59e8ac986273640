"""Walk through planning a one-sample mean study with predicted labels.

Scenario: a pool of N = 5000 unlabeled records carries model predictions,
the predictor correlates with the truth at rho = 0.7 (R^2 = 0.49), and we
want to detect a shift of 0.2 outcome standard deviations with 80% power
at the 5% level.  How many gold-standard labels do we need to buy?
"""

from predpower import (
    DesignInputs,
    MomentSet,
    classical_n,
    ppi_pp_n,
    rule_of_thumb,
    vanilla_ppi_n,
)

design = DesignInputs(alpha=0.05, target_power=0.8, delta=0.2)
moments = MomentSet(var_y=1.0, var_f=1.0, cov_yf=0.7)
pool = 5000

print("Design: two-sided level 0.05, target power 0.80, effect delta = 0.2")
print(f"Predictions: rho = {moments.rho:.2f} (R^2 = {moments.rho2:.2f}), pool N = {pool}")
print()

n_classical = classical_n(moments.var_y, design)
print(f"Classical design (ignore predictions): n = {n_classical}")

vanilla = vanilla_ppi_n(moments, pool, design)
print(
    f"Unweighted rectified design (weight 1): n = {vanilla.n_star} "
    f"({vanilla.reduction_fraction:.1%} fewer labels)"
)

optimal = ppi_pp_n(moments, pool, design)
print(
    f"Optimally weighted design:              n = {optimal.n_star} "
    f"({optimal.reduction_fraction:.1%} fewer labels)"
)
print(
    f"  optimal prediction weight {optimal.lambda_star:.3f}, "
    f"analytic power at n* = {optimal.analytic_power_at_n:.3f}"
)
print()
print(
    "Rule of thumb: required labels shrink by about R^2, i.e. to "
    f"{rule_of_thumb(moments.rho2):.0%} of the classical count "
    f"(~{round(rule_of_thumb(moments.rho2) * n_classical)} labels here)."
)
print()

print("Sweep over prediction quality (N = 5000):")
print(f"  {'R^2':>5} {'n*':>5} {'reduction':>10}")
for rho in (0.0, 0.3, 0.5, 0.7, 0.9, 0.95):
    m = MomentSet(1.0, 1.0, rho)
    plan = ppi_pp_n(m, pool, design)
    print(f"  {rho**2:5.2f} {plan.n_star:5d} {plan.reduction_fraction:10.1%}")
print()

print("Sweep over pool size (rho = 0.7):")
print(f"  {'N':>6} {'n*':>5}  note")
for n_unl in (100, 200, 500, 1000, 5000, 50000):
    plan = ppi_pp_n(moments, n_unl, design)
    note = "pool exhausted" if plan.pool_exhausted else ""
    print(f"  {n_unl:6d} {plan.n_star:5d}  {note}")
print()
print("Gains saturate once the pool is roughly 10-20x the labeled size.")
