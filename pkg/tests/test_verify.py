import numpy as np
import pytest

from dynrmat import constructors as C
from dynrmat import tensorspace as T
from dynrmat import verify as V
from dynrmat.thetafn import EllipticParams

FULL = C.IntervalDecomposition.full


def _injected(fam, value):
    def ev(lam):
        D = fam.dense(lam).copy()
        D[0, 3] = value  # v_1 (x) v_1 -> v_0 (x) v_0
        return D

    return C.RFamily(fam.N, fam.gamma, ev, {}, dense_output=True)


def test_zero_weight_residual_of_injected_entry():
    r = V.check_zero_weight(_injected(C.rational_hecke_R(FULL(2)), 2e-3))
    # [D, h_0 (x) 1 + 1 (x) h_0] scales the entry by the weight gap 2
    assert r.max_abs == pytest.approx(4e-3)
    assert V.check_zero_weight(C.rational_hecke_R(FULL(2))).max_abs == 0


@pytest.mark.parametrize("N", [2, 3, 4])
def test_qdyb_holds_for_hecke_families(N):
    spec = V.SampleSpec(count=6)
    assert V.check_qdyb(C.rational_hecke_R(FULL(N)), spec).max_abs < 1e-8
    assert V.check_qdyb(C.trig_hecke_R(C.decompose([0, 1], N), 0.3 + 0.1j), spec).max_abs < 1e-8
    assert V.check_qdyb(C.frt_constant_R(list(range(N))[::-1], 2.0), spec).max_abs < 1e-8


def test_qdyb_detects_flipped_exchange_sign():
    f = C.rational_hecke_R(FULL(3))
    bad = C.RFamily(3, 1.0, lambda lam: T.ZeroWeightOp(f.op(lam).alpha, -f.op(lam).beta), {})
    assert V.check_qdyb(bad, V.SampleSpec(count=5)).max_abs > 1e-2


def test_spectral_qdyb_and_unitarity():
    spec = V.SampleSpec(count=5)
    fams = [
        C.spectral_rational_R(FULL(3), 0.7),
        C.spectral_trig_R(FULL(2), 0.4),
        C.spectral_elliptic_R(2, 0.3, EllipticParams(1j)),
    ]
    espec = V.SampleSpec(count=5, radius=0.5, z_radius=0.5)
    for fam, sp in zip(fams, (spec, spec, espec)):
        assert V.check_qdyb_spectral(fam, sp).max_abs < 1e-8
        assert V.check_unitarity(fam, sp).max_abs < 1e-8


def test_hecke_parameters():
    r = V.check_hecke(C.trig_hecke_R(FULL(2), np.log(2)))
    assert r.p == pytest.approx(1) and r.q == pytest.approx(2)
    assert r.residual.max_abs < 1e-10
    r = V.check_hecke(C.identity_family(2))
    assert (r.p, r.q) == (1, 1)


def test_coordinate_relations_for_trig_family():
    res = V.check_coordinate_relations(C.trig_hecke_R(FULL(3), 0.4))
    assert {"trace", "det", "alpha_product"} <= set(res)
    assert max(r.max_abs for r in res.values()) < 1e-10


@pytest.mark.parametrize("kind", ["rational", "trig"])
def test_classical_dynamical_equation(kind):
    assert V.check_cdyb(C.classical_r(kind, FULL(3))).max_abs < 1e-6


def test_classical_couplings():
    rep = V.check_classical_unitarity_and_residue(C.classical_spectral_r("rational", FULL(2)))
    eps, delta, res = rep
    assert eps == pytest.approx(1) and abs(delta) < 1e-12
    assert res.max_abs < 1e-6


def test_sample_stream_is_seeded():
    a, b = V.SampleSpec(seed=7), V.SampleSpec(seed=7)
    np.testing.assert_array_equal(a.lam(a.rng(1), 3), b.lam(b.rng(1), 3))
    c = V.SampleSpec(seed=8)
    assert not np.array_equal(a.lam(a.rng(1), 3), c.lam(c.rng(1), 3))


def test_residual_json_is_plain():
    import json

    r = V.check_qdyb(C.rational_hecke_R(FULL(2)), V.SampleSpec(count=3))
    doc = r.to_json("qdyb", 1e-8)
    json.dumps(doc)
    assert doc["samples"] == 3 and doc["pass"] is True


def test_degeneration_trig_to_rational():
    res = V.degeneration_check("trig_to_rational", {"N": 2}, V.SampleSpec(count=3), raise_on_fail=False)
    assert res[-1].max_abs < res[0].max_abs
