"""Concurrence and PPT verdicts along the isotropic family and on named states."""

import numpy as np

from entconfusion import entwitness, qchannel, qstate

print(" alpha  concurrence  negativity")
for a in np.linspace(-1 / 3, 1, 9):
    rho = qstate.isotropic(2, a)
    print(f"{a:6.3f}  {entwitness.concurrence(rho).value:11.4f}  {entwitness.negativity(rho):10.4f}")
print(f"entanglement breaking threshold for d=2: alpha = {qchannel.alpha_crit(2):.4f}")

for name, rho in [("isotropic(3, 0.9)", qstate.isotropic(3, 0.9)),
                  ("classical-quantum", qstate.canonical_state("cq")),
                  ("horodecki(0.2)", qstate.horodecki_ppt(0.2))]:
    rep = entwitness.ppt_check(rho)
    print(f"{name:18s} min PT eigenvalue {rep.min_eigenvalue:+.4f}  PPT={rep.is_ppt}  "
          f"verdict={entwitness.is_entangled(rho)}")
