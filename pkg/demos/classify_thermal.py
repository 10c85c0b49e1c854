"""Entangled/separable verdicts from the confusion peak on the thermal path.

The peak above lambda = 1/2 means entangled.  Slow for qutrit inputs, so
only two-qubit states are run here.
"""

import numpy as np

from entconfusion import confusion, ffnn, qstate

cfg = ffnn.preset("table3_2x2")
for a in (0.9, 0.2):
    v = confusion.classify(qstate.isotropic(2, a), cfg, 2, np.random.default_rng(int(10 * a)), n=700)
    print(f"isotropic(2, {a}): {v.verdict} (lambda* = {v.lambda_star})")
