import numpy as np
import pytest

from dynrmat import constructors as C
from dynrmat import tensorspace as T
from dynrmat.errors import EvaluationPole, InputError
from dynrmat.thetafn import EllipticParams

FULL2 = C.IntervalDecomposition.full(2)


def test_decompose_splits_into_maximal_runs():
    d = C.decompose([0, 1, 3], 4)
    assert d.intervals == ((0, 1), (3, 3))
    assert d.members == frozenset({0, 1, 3})
    assert d.same_block(0, 1) and not d.same_block(1, 3) and not d.same_block(2, 2)
    assert C.decompose([], 3).intervals == ()


def test_decompose_rejects_out_of_range():
    with pytest.raises(InputError):
        C.decompose([0, 5], 3)
    with pytest.raises(InputError):
        C.IntervalDecomposition(4, ((0, 1), (1, 2)))


def test_rational_values_at_sample_point():
    op = C.rational_hecke_R(FULL2).op([2, 0])
    np.testing.assert_allclose(op.alpha[0, 1], 1.5)
    np.testing.assert_allclose(op.beta[0, 1], 0.5)
    np.testing.assert_allclose(op.alpha[1, 0], 0.5)
    np.testing.assert_allclose(op.beta[1, 0], -0.5)
    np.testing.assert_allclose(np.diag(op.alpha), [1, 1])


def test_trig_values_at_sample_point():
    op = C.trig_hecke_R(FULL2, np.log(2)).op([1, 0])
    np.testing.assert_allclose(op.beta[0, 1], 1)
    np.testing.assert_allclose(op.alpha[0, 1], 3)
    np.testing.assert_allclose(op.beta[1, 0], -2)
    np.testing.assert_allclose(op.alpha[1, 0], 0, atol=1e-14)


def test_frt_identity_permutation():
    op = C.frt_constant_R([0, 1], 2.0).op([0.3, -1.1])
    np.testing.assert_allclose(op.alpha, [[1, 2], [1, 1]])
    np.testing.assert_allclose(op.beta, [[0, 0], [-1, 0]])


def test_spectral_rational_values():
    op = C.spectral_rational_R(FULL2, 1.0).op(3, [2, 0])
    np.testing.assert_allclose(op.alpha[0, 1], 9 / 4)
    np.testing.assert_allclose(op.beta[0, 1], 1 / 4)


def test_spectral_pole_at_step():
    with pytest.raises(EvaluationPole):
        C.spectral_rational_R(FULL2, 1.0).op(1.0, [2, 0])


def test_rational_pole_on_diagonal():
    with pytest.raises(EvaluationPole):
        C.rational_hecke_R(FULL2).op([1, 1])


def test_elliptic_at_zero_spectral_parameter_is_flip():
    fam = C.spectral_elliptic_R(3, 0.3, EllipticParams(1j))
    np.testing.assert_allclose(fam.dense(0, [0.2, 0.1, -0.4]), T.swap(3), atol=1e-12)


def test_identity_family():
    fam = C.identity_family(3)
    np.testing.assert_allclose(fam.dense([0.1, 0.2, 0.3]), np.eye(9))


def test_off_block_pairs_are_trivial_in_rational_case():
    f = C.rational_hecke_R(C.IntervalDecomposition.empty(3))
    for lam in ([0.1, 0.7, -2.0], [5.0, 1.0, 3.0]):
        op = f.op(lam)
        np.testing.assert_allclose(op.alpha, np.ones((3, 3)))
        np.testing.assert_allclose(op.beta, 0)


def test_off_block_pairs_in_trig_case():
    q = 3.0
    op = C.trig_hecke_R(C.IntervalDecomposition.empty(2), np.log(q)).op([0.4, -0.2])
    # a < b: no exchange; a > b: exchange coefficient 1 - q
    np.testing.assert_allclose(op.beta, [[0, 0], [1 - q, 0]])
    np.testing.assert_allclose(op.alpha, [[1, q], [1, 1]])


def test_quasiconstant_laws():
    C.QuasiconstantTable.from_potential([0.0, 1.0, 3.0]).check()
    C.QuasiconstantTable.from_potential([1.0, 2.0, 0.5], "multiplicative").check()
    bad = np.array([[0, 1], [1, 0]])
    with pytest.raises(InputError):
        C.QuasiconstantTable("additive", bad).check()
    with pytest.raises(InputError):
        C.QuasiconstantTable("other", bad)


def test_quasiconstant_shifts_rational_denominators():
    mu = C.QuasiconstantTable.from_potential([0.0, 0.5])  # mu_01 = -0.5
    op = C.rational_hecke_R(FULL2, mu).op([2, 0])
    ref = C.rational_hecke_R(FULL2).op([2.5, 0])
    np.testing.assert_allclose(op.beta[0, 1], 1 / 2.5)
    np.testing.assert_allclose(op.beta, ref.beta)
