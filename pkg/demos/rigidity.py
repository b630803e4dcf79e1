"""Rigidity matrices of the full trigonometric family and the crossing relation."""

import numpy as np

from dynrmat import algebroid as A
from dynrmat import constructors as C
from dynrmat import verify as V

eps = 0.3 + 0.1j
q = np.exp(eps)
for N in (2, 3):
    fam = C.trig_hecke_R(C.IntervalDecomposition.full(N), eps)
    lam = np.array([0.3, -0.4, 0.9][:N])
    r = A.compute_rigidity(fam, lam)
    cf = A.closed_form_Q_trig(lam, q)
    print(f"N={N}: |Q - closed form| = {np.abs(np.diag(r.Q - cf.Q)).max():.1e}")
    print(f"      Q'Q / q^(N-1) = {np.round(np.diag(r.Qp * r.Q) / q ** (N - 1), 12)}")
    print(f"      Q'Q / q       = {np.round(np.diag(r.Qp * r.Q) / q, 6)}")
    print(f"      crossing residual {A.check_crossing(fam, V.SampleSpec(count=5)).max_abs:.1e}")

print("Cauchy determinant (x=(3,5), y=(0,1)):", A.cauchy_det_check([3, 5], [0, 1])[:2])
