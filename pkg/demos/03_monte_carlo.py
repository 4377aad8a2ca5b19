"""
Estimating an expectation value through a cut
==============================================

Each shot picks a circuit with probability |c_i|/kappa, measures the
observable, and reports sign(c_i) * kappa * outcome.
"""

import numpy as np

from nmecut import EstimatorConfig, PureState, SchmidtVector, empirical_overhead, estimate, qpd_baseline, qpd_nme
from nmecut.estimator import exact_value

plus = PureState(np.ones(2) / np.sqrt(2))
cfg = EstimatorConfig(shots=200_000, seed=1)

for label, q in [("no resource", qpd_baseline(1)),
                 ("R = 0.6", qpd_nme(1, [np.sqrt(0.9), np.sqrt(0.1)])),
                 ("Bell pair", qpd_nme(1, SchmidtVector.maximal(1)))]:
    r = estimate(q, plus, "X", cfg)
    print(f"{label:12s} kappa={q.kappa:4.2f}  estimate={r.estimate:+.4f} +- {r.std_error:.4f}")

print("exact:", exact_value(plus, "X"))

# per-shot second moment grows as kappa^2
rep = empirical_overhead(qpd_baseline(1), plus, "X", cfg)
print("second moment", rep.second_moment, "vs kappa^2", rep.kappa_squared)
