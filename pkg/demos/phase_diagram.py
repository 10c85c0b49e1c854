"""Critical points along a few local-depolarizing curves against the exact boundary a1*a2 = 1/3."""

import numpy as np

from entconfusion import confusion, ffnn, trajectory as tj

cfg = ffnn.preset("table2")
specs = [tj.CurveSpec("local_depolarizing", n) for n in (0.5, 1.0, 1.5)]
pd = confusion.phase_diagram("local_depolarizing", specs, cfg, 2, np.random.default_rng(0), grid_points=15, n=600)
for (spec, curve), pt in zip(pd.curves, pd.critical_points):
    if pt is None:
        print(f"{spec.label}: {curve.critical_error}")
    else:
        print(f"{spec.label}: gamma*={curve.critical:.3f}  (a1, a2)=({pt[0]:+.3f}, {pt[1]:+.3f})  "
              f"a1*a2={pt[0] * pt[1]:.3f}")
