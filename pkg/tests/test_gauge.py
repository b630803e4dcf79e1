import numpy as np
import pytest

from dynrmat import constructors as C
from dynrmat import gauge as G
from dynrmat import verify as V
from dynrmat.errors import DivisionByZero, InputError

FULL = C.IntervalDecomposition.full
SPEC = V.SampleSpec(count=5)
LAM3 = np.array([0.3, 1.2, -0.7])


def test_d_gamma_of_exponential_one_form():
    # phi_0 = exp(l0 l1), phi_1 = 1
    phi = G.MultiplicativeForm(1, 2, lambda idx, lam: np.exp(lam[0] * lam[1]) if idx == (0,) else 1.0, False)
    d = G.d_gamma(phi, 1.0)
    lam = np.array([0.4, 0.9])
    # delta_0 phi_1 / delta_1 phi_0 = 1 / exp(l0 gamma)
    assert d((0, 1), lam) == pytest.approx(np.exp(-lam[0]))


def test_difference_operator():
    lam = np.array([0.4, 0.9])
    assert G.delta_a(lambda l: np.exp(l[0]), 0, 0.7)(lam) == pytest.approx(np.exp(0.7))
    assert G.delta_a(lambda l: np.exp(l[0]), 1, 0.7)(lam) == pytest.approx(1)


def test_d_gamma_squares_to_one(rng):
    A = rng.normal(size=(3, 3)) * 0.3
    B = rng.normal(size=(3, 3, 3)) * 0.1
    E = G.polynomial_one_form(A, B)
    phi = G.quantize_closed_form(E, 0.6)
    assert G.check_gamma_closed(phi, 0.6, SPEC).max_abs < 1e-10


def test_quantized_form_is_first_order_in_step():
    # E_a = l_a^2, so dE = 0 and the quantization is trivial to first order
    E = G.polynomial_one_form(np.zeros((2, 2)), np.array([[[1, 0], [0, 0]], [[0, 0], [0, 1]]]))
    lam = np.array([0.3, -0.5])
    vals = [G.quantize_closed_form(E, g)((0, 1), lam) for g in (1e-2, 5e-3)]
    log_rich = 2 * np.log(vals[1]) / 5e-3 - np.log(vals[0]) / 1e-2
    assert abs(log_rich) < 1e-6


def test_scale_by_one_is_identity():
    f = C.rational_hecke_R(FULL(3))
    g = G.gauge_constant(f, G.GaugeMove("scale", {"c": 1.0}))
    np.testing.assert_array_equal(g.dense(LAM3), f.dense(LAM3))
    assert g.gamma == f.gamma


def test_affine_move_halves_step():
    f = C.rational_hecke_R(FULL(3))
    g = G.gauge_constant(f, G.GaugeMove("affine", {"c": 2.0, "b": 1, "mu": np.zeros(3)}))
    assert g.gamma == pytest.approx(0.5)
    np.testing.assert_allclose(g.dense(LAM3), f.dense(2 * LAM3))
    assert V.check_qdyb(g, SPEC).max_abs < 1e-10


def test_inverse_chain_undoes_chain(rng):
    f = C.trig_hecke_R(C.decompose([0, 1], 3), 0.3)
    E = G.polynomial_one_form(rng.normal(size=(3, 3)) * 0.2)
    chain = [
        G.GaugeMove("two_form", {"form": G.quantize_closed_form(E, 1.0)}),
        G.GaugeMove("perm", {"sigma": np.array([2, 0, 1])}),
        G.GaugeMove("affine", {"c": 1.5, "b": 1, "mu": np.array([0.1, 0.0, -0.2])}),
    ]
    g = G.apply_chain(f, chain)
    assert V.check_qdyb(g, SPEC).max_abs < 1e-8
    back = G.apply_chain(g, G.inverse_chain(chain))
    np.testing.assert_allclose(back.dense(LAM3), f.dense(LAM3), atol=1e-10)


def test_permutation_move_keeps_qdyb():
    f = C.rational_hecke_R(C.decompose([0, 1], 3))
    g = G.gauge_constant(f, G.GaugeMove("perm", {"sigma": np.array([2, 0, 1])}))
    assert V.check_qdyb(g, SPEC).max_abs < 1e-10


def test_move_json_round_trip(rng):
    E = G.polynomial_one_form(rng.normal(size=(2, 2)))
    m = G.GaugeMove("two_form", {"form": G.quantize_closed_form(E, 1.0)})
    m2 = G.GaugeMove.from_json(m.to_json(), 2)
    lam = np.array([0.2, 0.5])
    assert m2.payload["form"]((0, 1), lam) == pytest.approx(m.payload["form"]((0, 1), lam))
    with pytest.raises(InputError):
        G.GaugeMove.from_json({"kind": "nope"}, 2)


def test_stencil_selection_is_unique():
    assert G.select_stencil() == "literal:gamma"


def test_spectral_psi_move_keeps_qdyb():
    fam = C.spectral_rational_R(FULL(2), 0.8)
    psi = G.QuadraticPotential(np.array([[0.2, 0.1], [0.0, -0.3]]), np.array([0.1, -0.2]))
    g = G.gauge_spectral(fam, G.GaugeMove("psi", {"psi": psi, "stencil": "auto"}))
    assert V.check_qdyb_spectral(g, SPEC).max_abs < 1e-8


def test_gauge_fixing_of_canonical_trig_family_is_trivial():
    t = C.trig_hecke_R(FULL(3), 0.4)
    phi, fixed = G.gauge_fixing_two_form(t)
    for idx in [(0, 1), (0, 2), (1, 2)]:
        assert phi(idx, LAM3) == pytest.approx(1)
    np.testing.assert_allclose(fixed.dense(LAM3), t.dense(LAM3), atol=1e-12)


def test_gauge_fixing_raises_where_alpha_vanishes():
    t = C.trig_hecke_R(FULL(3), 0.4)
    phi, _ = G.gauge_fixing_two_form(t)
    with pytest.raises(DivisionByZero):
        phi((1, 2), [1.0, 2.0, 3.0])  # lambda_12 = -1 is a zero of alpha_12
