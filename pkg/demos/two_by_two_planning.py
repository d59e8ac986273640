"""Plan a 2x2 relative-risk study where a classifier screens for the event.

Scenario: control event probability 0.20, expected treated probability
0.40 (relative risk 2.0), and a diagnostic classifier with sensitivity =
specificity = 0.90 available on a large unlabeled pool.
"""

from predpower import BinaryMetrics, TwoByTwoSpec, calibrate_binary, two_by_two_n

p0, p1 = 0.20, 0.40
se = sp = 0.90

# Classifier metrics -> per-group outcome-prediction correlations.
m0 = calibrate_binary(BinaryMetrics(prevalence=p0, sensitivity=se, specificity=sp))
m1 = calibrate_binary(BinaryMetrics(prevalence=p1, sensitivity=se, specificity=sp))
print(f"Control group:  prevalence {p0:.2f}, implied rho^2 = {m0.rho2:.3f}")
print(f"Treated group:  prevalence {p1:.2f}, implied rho^2 = {m1.rho2:.3f}")
print()

classical = two_by_two_n(TwoByTwoSpec(p0, p1, 0.0, 0.0, measure="RR"))
powered = two_by_two_n(TwoByTwoSpec(p0, p1, m0.rho, m1.rho, measure="RR"))
print(f"Relative-risk test, alpha = 0.05, power 0.80:")
print(f"  classical labels per group:        n0 = {classical[0]}")
print(f"  prediction-powered labels/group:   n0 = {powered[0]}")
print(f"  reduction: {1 - powered[0] / classical[0]:.1%}")
print()

classical_or = two_by_two_n(TwoByTwoSpec(p0, p1, 0.0, 0.0, measure="OR"))
powered_or = two_by_two_n(TwoByTwoSpec(p0, p1, m0.rho, m1.rho, measure="OR"))
print("Odds-ratio scale for the same study:")
print(f"  classical n0 = {classical_or[0]}, powered n0 = {powered_or[0]}")
print()

print("Unbalanced allocation (2 treated per control):")
n0, n1 = two_by_two_n(TwoByTwoSpec(p0, p1, m0.rho, m1.rho, kappa=2.0))
print(f"  n0 = {n0} controls, n1 = {n1} treated")
print()

print("Classifier quality sweep (balanced RR design):")
print(f"  {'se=sp':>6} {'n0':>5}")
for acc in (0.6, 0.7, 0.8, 0.9, 0.95, 1.0):
    g0 = calibrate_binary(BinaryMetrics(p0, acc, acc))
    g1 = calibrate_binary(BinaryMetrics(p1, acc, acc))
    n0, _ = two_by_two_n(TwoByTwoSpec(p0, p1, g0.rho, g1.rho))
    print(f"  {acc:6.2f} {n0:5d}")
