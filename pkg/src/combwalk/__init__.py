"""combwalk: persistent random walks with variable-length memory.

A walk on the integers keeps moving in its current direction with a
probability that depends on how long it has been doing so.  When those
persistence times have heavy tails the rescaled walk stops being
Brownian: depending on the tail index it converges to a stable process,
a Cauchy process with slowly-varying normalization, or -- when runs
have infinite mean -- a 1-Lipschitz "telegraph on a subordinator" whose
one-time law is an arcsine-Lamperti distribution.  This package builds
the walks, computes every normalizer in closed form, simulates the
limit objects, and ships statistical checks that verify each regime
end to end.
"""

from .comb_model import (CombSpec, GraftSpec, HazardFamily, PersistenceLaw,
                         check_assumption1, constant_comb,
                         envelope_transitions, power_comb,
                         sample_persistence_time, tail, truncated_mean,
                         truncated_second_moment)
from .scaling_laws import (NormalizerSet, RegimeReport, classify_regime,
                           cycle_tail, cycle_truncated_second_moment,
                           effective_drift, equivalence_checks, mean_drift,
                           skewness_beta, stable_scale, stable_sigma,
                           stable_skewness, tail_balance, total_mean_cycle)
from .walk_sim import (Trajectory, age_process, counting, rescaled_path,
                       simulate_prw, skeleton, walk_marginals)
from .stable_proc import (brownian_path, default_jump_cut, levy_symbol,
                          sample_positive_stable, sample_stable,
                          stable_cdf_interp, stable_path, subordinator_level,
                          subordinator_path)
from .lamperti_limit import (AnomalousPath, DensityEvaluator,
                             LabelledSubordinatorPath, anomalous_path,
                             cdf_f, density_f, double_gf_limit, flt_f,
                             labelled_subordinator, lamperti_recursion,
                             markov_kernel_check, ppf_f, renewal_state,
                             sample_anomalous_ensemble, sample_marginal,
                             sample_ratio)
from .stat_verify import (HillResult, VerificationScenario, drift_l1,
                          empirical_char_fn, format_report, hill_estimate,
                          ks_distance, verify_regime)

__version__ = "0.1.0"
