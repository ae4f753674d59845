"""Coverage along the radius: analytic profile against simulation.

The centre is the worst place to stand; coverage peaks part of the way out
and drops again near the edge. Run: ``python demos/radial_profile.py``.
"""

import numpy as np

from finitenet import DiskGeometry, EvalPoint, NetworkModel, RadialRule, SimConfig, estimate_coverage

model = NetworkModel.from_density(DiskGeometry(1.0), 2, 3.87, shadow_std_db=6.0)
sim = SimConfig(50_000, seed=1)

print(f"N = {model.n_aps} APs, T = 0 dB")
print(" d_km  analytic  simulated  (se)")
for d in np.round(np.arange(0.0, 1.0001, 0.1), 1):
    point = EvalPoint(d)
    cp = RadialRule(point, model).coverage(1.0)
    mc = estimate_coverage(1.0, point, model, sim)
    print(f"{d:5.1f}  {cp:8.4f}  {mc.value:9.4f}  ({mc.std_error:.4f})")
