import numpy as np
import pytest

from dynrmat import algebroid as A
from dynrmat import constructors as C
from dynrmat import verify as V
from dynrmat.errors import InputError, SingularInput

FULL = C.IntervalDecomposition.full
SPEC = V.SampleSpec(count=4, radius=1.0)


def test_trivial_rep_satisfies_rll_exactly():
    fam = C.rational_hecke_R(FULL(2))
    assert A.check_rll(A.trivial_rep(2), fam, SPEC).max_abs == 0


def test_basic_rep_satisfies_rll():
    fam = C.trig_hecke_R(FULL(3), 0.3)
    assert A.check_rll(A.basic_rep(fam), fam, SPEC).max_abs < 1e-10


def test_corrupted_rep_fails_rll():
    fam = C.rational_hecke_R(FULL(2))
    rep = A.basic_rep(fam)
    bad = A.LOperatorRep(2, rep.gamma, rep.weights, lambda lam: rep(lam) + np.diag([0, 0.5, 0, 0]))
    assert A.check_rll(bad, fam, SPEC).max_abs > 0.05


def test_tensor_rep_satisfies_rll():
    fam = C.rational_hecke_R(FULL(2))
    b = A.basic_rep(fam)
    assert A.check_rll(A.tensor_rep(b, b), fam, SPEC).max_abs < 1e-8


def test_intertwiners():
    fam = C.rational_hecke_R(FULL(2))
    b = A.basic_rep(fam)
    assert A.check_intertwiner(lambda lam: np.eye(2), b, b, SPEC).max_abs < 1e-12
    M = np.array([[1.0, 2.0], [0.5, -1.0]])
    assert A.check_intertwiner(lambda lam: M, b, b, SPEC).max_abs > 1e-2


@pytest.mark.parametrize("first,second", [("right", "left"), ("left", "right")])
def test_double_dual_returns_rep(first, second):
    fam = C.trig_hecke_R(FULL(2), 0.4)
    b = A.basic_rep(fam)
    back = A.dual_rep(A.dual_rep(b, first), second)
    lam = np.array([0.3, -0.6])
    np.testing.assert_allclose(back(lam), b(lam), atol=1e-9)
    np.testing.assert_allclose(back.weights, b.weights)


def test_dual_of_trivial_is_trivial():
    t = A.trivial_rep(3)
    np.testing.assert_allclose(A.dual_rep(t)(np.zeros(3)), np.eye(3))


def test_dual_side_is_validated():
    with pytest.raises(InputError):
        A.dual_rep(A.trivial_rep(2), "up")


def test_rigidity_values_at_sample_point():
    fam = C.trig_hecke_R(FULL(2), np.log(2))
    r = A.compute_rigidity(fam, [2, 0])
    np.testing.assert_allclose(np.diag(r.Q), [2 / 3, 7 / 3])
    cf = A.closed_form_Q_trig([2, 0], 2.0)
    np.testing.assert_allclose(np.diag(cf.Q), [2 / 3, 7 / 3])
    assert cf.Qp[0, 0] == pytest.approx(3)


def test_rigidity_of_rank_one():
    fam = C.trig_hecke_R(FULL(1), 0.3)
    np.testing.assert_allclose(A.compute_rigidity(fam, [0.2]).Q, [[1]])


@pytest.mark.parametrize("N", [2, 3])
def test_rigidity_product_is_power_of_q(N):
    eps = 0.3
    lam = np.array([0.3, -0.4, 0.9][:N])
    r = A.compute_rigidity(C.trig_hecke_R(FULL(N), eps), lam)
    cf = A.closed_form_Q_trig(lam, np.exp(eps))
    np.testing.assert_allclose(np.diag(r.Q), np.diag(cf.Q), atol=1e-12)
    np.testing.assert_allclose(np.diag(r.Qp * r.Q), np.exp(eps) ** (N - 1), atol=1e-12)


def test_cauchy_determinant():
    lhs, rhs, err = A.cauchy_det_check([3, 5], [0, 1])
    assert rhs == pytest.approx(-1 / 60) and err < 1e-12
    with pytest.raises(SingularInput):
        A.cauchy_det_check([1, 2], [2, 3])


def test_crossing_with_and_without_correct_q():
    fam = C.trig_hecke_R(FULL(3), 0.3)
    spec = V.SampleSpec(count=3)
    assert A.check_crossing(fam, spec).max_abs < 1e-9
    assert A.check_crossing(fam, spec, Q=lambda l: np.eye(3)).max_abs > 0.1


def test_relation_instances_and_records():
    fam = C.trig_hecke_R(C.IntervalDecomposition.empty(2), np.log(3))
    lam1, lam2 = np.array([0.1, 0.2]), np.array([0.3, 0.5])
    inst, recs = A.relation_list(fam, lam1, lam2)
    assert len(inst) == 16
    same_row = {tuple(r["indices"]): r["coeff"] for r in recs if r["kind"] == "same_row"}
    # alpha_01 = q = 3 and beta_01 = 0 off-block
    assert same_row[(0, 0, 0, 1)] == pytest.approx([3, 0])


@pytest.mark.parametrize(
    "fam",
    [C.rational_hecke_R(FULL(3)), C.trig_hecke_R(C.decompose([0, 1], 3), 0.4), C.frt_constant_R([1, 0, 2], 2.0)],
    ids=["rational", "trig", "frt"],
)
def test_structured_relations_lie_in_span(fam):
    N = fam.N
    lam1, lam2 = np.array([0.21, -0.33, 0.57]), np.array([0.12, 0.48, -0.26])
    inst, recs = A.relation_list(fam, lam1, lam2)
    M = np.array([r.vector for r in inst])
    U, s, _ = np.linalg.svd(M.T, full_matrices=False)
    basis = U[:, s > 1e-9 * s[0]]
    for rec in recs:
        v = A.structured_vector(rec, N)
        if v is None:
            continue
        resid = v - basis @ (basis.conj().T @ v)
        assert np.max(np.abs(resid)) < 1e-10, rec


@pytest.mark.parametrize(
    "fam,degree,expected",
    [
        (C.identity_family(2), 2, (6, 10)),
        (C.identity_family(3), 2, (36, 45)),
        (C.rational_hecke_R(FULL(2)), 2, (6, 10)),
        (C.trig_hecke_R(FULL(3), 0.3), 2, (36, 45)),
        (C.rational_hecke_R(FULL(2)), 3, (44, 20)),
        (C.trig_hecke_R(C.IntervalDecomposition.empty(2), 0.3), 3, (44, 20)),
    ],
)
def test_pbw_ranks(fam, degree, expected):
    rep = A.pbw_rank_check(fam, degree)
    assert (rep.rank, rep.quotient_dim) == expected
    assert rep.passes


def test_pbw_needs_stable_trials():
    with pytest.raises(InputError):
        A.pbw_rank_check(C.identity_family(2), 2, trials=2)
