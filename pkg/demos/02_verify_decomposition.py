"""
Checking the teleportation-based decomposition term by term
============================================================
"""

import numpy as np

from nmecut import SchmidtVector, qpd_baseline, qpd_nme, qpd_streamlined, verify_identity

rng = np.random.default_rng(0)

alpha = SchmidtVector.from_values(rng.random(4))
q = qpd_nme(2, alpha)
print("terms:", len(q), " kappa:", round(q.kappa, 4))
for t in q.terms:
    print(f"  {t.coefficient:+.4f}  {type(t.kind).__name__}")

# summing the weighted superoperators must give back the identity map
print("identity error:", verify_identity(q)["max_abs_error"])

# no entanglement at all: same circuits as the plain MUB decomposition
same = np.abs(qpd_nme(2, SchmidtVector.separable(2)).superop() - qpd_baseline(2).superop()).max()
print("separable resource vs baseline:", same)

# a Bell pair shared on one of three wires; the other two are measured and re-prepared
q3 = qpd_streamlined(3, 1, SchmidtVector.maximal(1))
print("3 wires, one Bell pair: kappa =", q3.kappa, " error =", verify_identity(q3)["max_abs_error"])
