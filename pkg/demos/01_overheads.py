"""
How much does entanglement buy when cutting wires?
===================================================

Cutting n wires with local operations alone costs a sampling overhead of
2^(n+1) - 1. Sharing a pure entangled pair with robustness R lowers it to
2^(n+1)/(R+1) - 1.
"""

import numpy as np

from nmecut import SchmidtVector, overhead_baseline, overhead_nme, robustness_pure

# a single wire, no entanglement: three circuits' worth of variance blow-up
print("one wire, no resource:", overhead_baseline(1))

# a weakly entangled pair, alpha = (sqrt(.9), sqrt(.1))
alpha = SchmidtVector.from_values([np.sqrt(0.9), np.sqrt(0.1)])
r = robustness_pure(alpha)
print(f"R = {r:.3f}  ->  gamma = {overhead_nme(1, r):.3f}")

# shots scale with gamma^2, so the saving compounds
for n in (1, 2, 3):
    rs = np.linspace(0, 2 ** n - 1, 5)
    gam = [overhead_nme(n, x) for x in rs]
    print(n, "wires:", " ".join(f"{g:6.2f}" for g in gam), " shot ratio at R=1:",
          round((overhead_baseline(n) / overhead_nme(n, min(1.0, 2 ** n - 1))) ** 2, 2))
