"""Degenerations between the families and their quasiclassical limits."""

from dynrmat import verify as V

spec = V.SampleSpec(count=5, seed=1)
for kind, params in [("elliptic_to_trig", {"N": 2}), ("trig_to_rational", {"N": 2}), ("frt_extrapolation", {"sigma": [2, 0, 1]})]:
    res = V.degeneration_check(kind, params, spec, raise_on_fail=False)
    print(f"{kind:18s}", " ".join(f"{r.max_abs:.1e}" for r in res))
