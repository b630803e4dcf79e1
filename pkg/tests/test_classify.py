import numpy as np
import pytest

from dynrmat import classify as K
from dynrmat import constructors as C
from dynrmat import gauge as G
from dynrmat.errors import CyclicOrder, NotTransitive

FULL = C.IntervalDecomposition.full


def test_extracts_zero_quasiconstant_of_rational_family():
    mu, related = K.extract_mu(C.rational_hecke_R(FULL(2)), 1.0)
    assert related[0, 1] and related[1, 0]
    assert abs(mu.values[0, 1]) < 1e-9


def test_extracts_unit_quasiconstant_of_trig_family():
    q = np.exp(0.4)
    mu, related = K.extract_mu(C.trig_hecke_R(FULL(2), 0.4), q)
    assert mu.values[0, 1] == pytest.approx(1) and mu.values[1, 0] == pytest.approx(1)


def test_off_block_trig_pair_is_zero_and_infinity():
    mu, related = K.extract_mu(C.trig_hecke_R(C.IntervalDecomposition.empty(2), 0.4), np.exp(0.4))
    assert mu.is_inf(0, 1) and mu.values[1, 0] == 0
    assert not related.any()


def test_all_infinite_forward_gives_empty_decomposition():
    N = 4
    v = np.where(np.triu(np.ones((N, N)), 1) > 0, np.inf, 0).astype(complex)
    sigma, d = K.build_decomposition(C.QuasiconstantTable("multiplicative", v))
    assert d.intervals == ()
    np.testing.assert_array_equal(sigma, np.arange(N))


def test_backward_infinities_are_sorted_forward():
    v = np.array([[0, 0], [np.inf, 0]], dtype=complex)
    sigma, d = K.build_decomposition(C.QuasiconstantTable("multiplicative", v))
    np.testing.assert_array_equal(sigma, [1, 0])


def test_inconsistent_order_is_rejected():
    inf = np.inf
    v = np.array([[0, inf, 0], [0, 0, inf], [1, 0, 0]], dtype=complex)
    with pytest.raises((NotTransitive, CyclicOrder)):
        K.build_decomposition(C.QuasiconstantTable("multiplicative", v))


def test_shuffled_blocks_are_made_consecutive():
    # canonical blocks {0,1}, {3,4} moved to {1,4}, {2,3}; index 0 is a singleton
    f = C.rational_hecke_R(C.IntervalDecomposition(5, ((0, 1), (3, 4))))
    g = G.gauge_constant(f, G.GaugeMove("perm", {"sigma": np.array([1, 4, 0, 2, 3])}))
    cf = K.classify(g)
    assert cf.case == "p_eq_q"
    assert cf.decomposition.intervals == ((0, 1), (2, 3))
    assert {int(cf.sigma[1]), int(cf.sigma[4])} == {0, 1}
    assert {int(cf.sigma[2]), int(cf.sigma[3])} == {2, 3}


def test_identity_is_rational_with_empty_decomposition():
    cf = K.classify(C.identity_family(3))
    assert cf.case == "p_eq_q" and cf.decomposition.intervals == ()
    assert cf.q == pytest.approx(1)


@pytest.mark.parametrize(
    "fam",
    [
        C.rational_hecke_R(FULL(3)),
        C.rational_hecke_R(C.decompose([0, 1], 3)),
        C.trig_hecke_R(FULL(3), 0.3),
        C.trig_hecke_R(C.decompose([1, 2], 4), 0.5 + 0.2j),
    ],
    ids=["rational-full", "rational-block", "trig-full", "trig-block"],
)
def test_canonical_families_classify_to_themselves(fam):
    cf = K.classify(fam)
    assert K.strip_singletons(cf.decomposition).intervals == K.strip_singletons(
        C.decompose(sorted(set().union(*[range(a, b + 1) for a, b in fam.meta["X"]])), fam.N)
    ).intervals
    np.testing.assert_array_equal(cf.sigma, np.arange(fam.N))
    lam = np.array([0.31, -0.47, 1.13, 0.29][: fam.N])
    np.testing.assert_allclose(cf.family().dense(lam), fam.dense(lam), atol=1e-8)


def test_gauge_scrambled_trig_family_recovers_q_and_blocks(rng):
    base = C.trig_hecke_R(C.decompose([0, 1], 3), 0.4, C.QuasiconstantTable.from_potential([1.0, 2.0, 1.0], "multiplicative"))
    E = G.polynomial_one_form(rng.normal(size=(3, 3)) * 0.2)
    chain = [
        G.GaugeMove("two_form", {"form": G.quantize_closed_form(E, 1.0)}),
        G.GaugeMove("perm", {"sigma": np.array([2, 1, 0])}),
        G.GaugeMove("scale", {"c": 1.7}),
    ]
    cf = K.classify(G.apply_chain(base, chain))
    assert cf.case == "p_ne_q"
    assert cf.q == pytest.approx(np.exp(0.4), abs=1e-8)
    assert cf.p == pytest.approx(1)
    assert len(K.strip_singletons(cf.decomposition).intervals) == 1


def test_canonical_form_json_fields():
    doc = K.classify(C.trig_hecke_R(FULL(2), 0.4)).to_json()
    assert set(doc) >= {"case", "p", "q", "sigma", "X", "mu", "gauge_chain", "contract_residual"}
    assert doc["X"] == [[0, 1]]
