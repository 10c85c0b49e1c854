"""Encode a two-qubit state with SIC measurements and reconstruct it.

Exact Born probabilities invert to the state to machine precision; finite
shot counts give an estimate whose error shrinks roughly as 1/sqrt(shots).
"""

import numpy as np

from entconfusion import numkernel as nk, qstate, sicpovm

rng = np.random.default_rng(1)
sic = sicpovm.build_sic(2)
print(f"d=2 SIC: overlap residual {sic.overlap_residual():.1e}, completeness {sic.completeness_residual():.1e}")

rho = qstate.isotropic(2, 0.8)
p = sicpovm.born_probabilities(rho, sic, sic)
print("Born probabilities:", np.round(p.probs, 4))
exact = sicpovm.reconstruct(p, sic, sic)
print(f"exact round trip error {np.linalg.norm(exact.mat - rho.mat):.1e}")

for shots in (256, 2048, 16384):
    counts = sicpovm.sample_counts(p, shots, rng)
    est = sicpovm.reconstruct(counts.frequencies(), sic, sic)
    print(f"{shots:6d} shots: trace distance {nk.trace_distance(est.mat, rho.mat):.4f}")
