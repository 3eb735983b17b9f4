"""Run verification scenarios end to end and print their reports.

A scenario bundles a comb, the regime it should land in, the rescaling
scale, replica count, observation times and a KS tolerance.  verify_regime
simulates, rescales with the module-computed normalizers, and compares
against the regime's limit law -- the same machinery `combwalk verify`
exposes on the command line.
"""

from combwalk import (VerificationScenario, constant_comb, format_report,
                      power_comb, verify_regime)

quick = VerificationScenario(constant_comb(0.25, 0.4), "gaussian",
                             u=500, replicas=2000, times=[1.0, 2.0],
                             tol_ks=0.08, seed=7, name="gaussian-quick")
print(format_report(verify_regime(quick, threads=2)))
print()

anomalous = VerificationScenario(power_comb(0.5), "anomalous",
                                 u=2000, replicas=2000, times=[0.5, 1.0],
                                 tol_ks=0.08, seed=11, name="anomalous-quick")
print(format_report(verify_regime(anomalous, threads=2)))
print()

# negative control: deliberately wrong reference index must FAIL
control = VerificationScenario(power_comb(0.5), "anomalous",
                               u=2000, replicas=2000, times=[1.0],
                               tol_ks=0.08, seed=11, name="wrong-reference",
                               reference={"alpha": 0.8})
report = verify_regime(control, threads=2)
print(format_report(report))
print()
print("negative control failed as intended:", not report["pass"])
