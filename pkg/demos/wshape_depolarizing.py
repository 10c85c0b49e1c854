"""W shape for depolarized two-qubit maximally entangled states.

Runs the 1400-point, 5-repeat protocol, which takes about half a minute.
"""

import numpy as np

from entconfusion import confusion, ffnn, qchannel, trajectory as tj

cfg = ffnn.preset("table1_2x2")
n, repeats = 1400, 5
rng = np.random.default_rng(0)
data = tj.depolarizing_dataset(2, n, rng)
curve = confusion.sweep(data, confusion.default_grid(data, 21), cfg, repeats, rng)
for g, a in zip(curve.gammas, curve.accuracy):
    print(f"{g:+.3f}  {a:.3f}  " + "#" * int(40 * a))
print(f"critical gamma {curve.critical} (entanglement breaks at {qchannel.alpha_crit(2):.4f})")
if curve.critical_error:
    print("note:", curve.critical_error)
