"""Build the canonical Hecke families and check the dynamical Yang-Baxter equation."""

import numpy as np

from dynrmat import constructors as C
from dynrmat import verify as V

spec = V.SampleSpec(count=20, seed=3)
X = C.decompose([0, 1, 3], 4)  # blocks {0,1} and {3}
print("decomposition:", X.intervals)

families = {
    "rational": C.rational_hecke_R(X, C.QuasiconstantTable.from_potential([0.0, 0.4, 0.0, 0.0])),
    "trig, q = 2": C.trig_hecke_R(X, np.log(2)),
    "FRT, reversed sigma": C.frt_constant_R([3, 2, 1, 0], 2.0),
}
for name, fam in families.items():
    qdyb = V.check_qdyb(fam, spec)
    hecke = V.check_hecke(fam, spec=spec)
    print(f"{name:22s} QDYB {qdyb.max_abs:.1e}  p={hecke.p:.4f}  q={hecke.q:.4f}")

sr = C.spectral_rational_R(C.IntervalDecomposition.full(3), 0.5)
print("spectral rational: QDYB", f"{V.check_qdyb_spectral(sr, spec).max_abs:.1e}", "unitarity", f"{V.check_unitarity(sr, spec).max_abs:.1e}")
