"""Check the analytic power curves against Monte Carlo rejection rates.

Runs a compact version of the validation harness on three designs and
prints analytic vs empirical power per grid cell, plus the tidy CSV the
harness emits.  Larger replicate counts tighten the Monte Carlo band; the
full validation grids live in the test suite.
"""

from predpower.sim import SimConfig, results_to_csv_text, run_experiment

REPLICATES = 500
SEED = 42


def show(title, cfg):
    print(title)
    print(f"  {'n':>4} {'N':>4} {'quality':>7} {'analytic':>9} {'empirical':>10} {'mc_se':>6}")
    for row in run_experiment(cfg):
        print(
            f"  {row.n:4d} {row.n_unlabeled:4d} {row.rho_or_accuracy:7.2f} "
            f"{row.analytic_power:9.3f} {row.empirical_power:10.3f} {row.mc_stderr:6.3f}"
        )
    print()


show(
    "One-sample Gaussian mean (delta = 0.2, oracle weight):",
    SimConfig(
        design="one_sample_cont",
        grid={"n": [20, 60, 100], "N": [500], "rho": [0.5, 0.9], "delta": [0.2]},
        replicates=REPLICATES,
        seed=SEED,
    ),
)

show(
    "Paired binary events (delta = 0.08, within-pair correlation 0.3):",
    SimConfig(
        design="paired_bin",
        grid={"n": [60, 100], "N": [500], "accuracy": [0.85], "delta": [0.08]},
        replicates=REPLICATES,
        seed=SEED,
    ),
)

show(
    "Logistic regression contrast (cross-fitted plug-in weight):",
    SimConfig(
        design="logistic_contrast",
        grid={"n": [60, 100], "N": [500], "accuracy": [0.8], "delta": [0.5]},
        replicates=REPLICATES,
        seed=SEED,
        lambda_mode="crossfit",
    ),
)

cfg = SimConfig(
    design="one_sample_cont",
    grid={"n": [40, 80], "N": [500], "rho": [0.7], "delta": [0.2]},
    replicates=200,
    seed=SEED,
    lambda_mode="plugin",
)
print("Tidy CSV output (plug-in weight, including weight RMSE):")
print(results_to_csv_text(run_experiment(cfg)))
