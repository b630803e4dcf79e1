"""Scramble a trigonometric family with gauge moves, then recover its canonical form."""

import numpy as np

from dynrmat import classify as K
from dynrmat import constructors as C
from dynrmat import gauge as G
from dynrmat import verify as V

rng = np.random.default_rng(0)
N = 4
mu = C.QuasiconstantTable.from_potential([1.0, 1.5, 0.7, 2.0], "multiplicative")
base = C.trig_hecke_R(C.decompose([0, 1, 2], N), 0.35, mu)

E = G.polynomial_one_form(0.2 * rng.normal(size=(N, N)), 0.05 * rng.normal(size=(N, N, N)))
chain = [
    G.GaugeMove("two_form", {"form": G.quantize_closed_form(E, 1.0)}),
    G.GaugeMove("perm", {"sigma": np.array([3, 1, 0, 2])}),
    G.GaugeMove("scale", {"c": 1.3}),
]
scrambled = G.apply_chain(base, chain)
print("QDYB after gauge:", f"{V.check_qdyb(scrambled).max_abs:.1e}")

cf = K.classify(scrambled)
print("case:", cf.case, " q:", np.round(cf.q, 10), " (expected", np.round(np.exp(0.35), 10), ")")
print("sigma:", cf.sigma.tolist(), " X:", cf.decomposition.intervals)
canon = cf.family()
print("canonical family QDYB:", f"{V.check_qdyb(canon).max_abs:.1e}", " Hecke q:", np.round(V.check_hecke(canon).q, 10))
