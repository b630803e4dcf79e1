import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynrmat import tensorspace as T
from dynrmat.errors import InvalidPermutation, NotZeroWeight, SingularPartialTranspose
from conftest import random_op


def test_dense_layout_of_two_by_two_example():
    op = T.ZeroWeightOp(np.array([[1, 1.5], [0.5, 1]]), np.array([[0, 0.5], [-0.5, 0]]))
    D = T.to_dense(op)
    expected = np.array([[1, 0, 0, 0], [0, 1.5, -0.5, 0], [0, 0.5, 0.5, 0], [0, 0, 0, 1]])
    np.testing.assert_allclose(D, expected)


def test_flip_round_trips_through_tables():
    P = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            P[b * 2 + a, a * 2 + b] = 1
    op = T.from_dense(P)
    np.testing.assert_allclose(op.alpha, np.eye(2))
    np.testing.assert_allclose(op.beta, 1 - np.eye(2))
    np.testing.assert_allclose(T.swap(2), P)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_from_dense_inverts_to_dense(N, rng):
    op = random_op(rng, N)
    assert T.from_dense(T.to_dense(op)).allclose(op)


def test_off_weight_entry_is_rejected(rng):
    D = T.to_dense(random_op(rng, 2))
    D[0, 3] = 1e-3
    with pytest.raises(NotZeroWeight) as info:
        T.from_dense(D)
    assert info.value.value == pytest.approx(1e-3)
    assert info.value.index == ((0, 0), (1, 1))


@pytest.mark.parametrize("N", [2, 3])
def test_partial_transpose_is_an_involution(N, rng):
    D = rng.normal(size=(N * N, N * N)) + 1j * rng.normal(size=(N * N, N * N))
    np.testing.assert_allclose(T.partial_dualize_t2(T.partial_dualize_t2(D)), D)
    # transposing both legs is the full transpose
    np.testing.assert_allclose(T.partial_transpose(T.partial_transpose(D, N, 0), N, 1), D.T)


@pytest.mark.parametrize("N", [2, 3])
def test_istar_inverse_is_an_involution(N, rng):
    X = T.to_dense(random_op(rng, N)) + 0.1 * rng.normal(size=(N * N, N * N))
    Y = T.istar_inverse(X)
    np.testing.assert_allclose(T.istar_inverse(Y), X, atol=1e-9)
    Xt, Yt = T.partial_dualize_t2(X), T.partial_dualize_t2(Y)
    np.testing.assert_allclose(Xt @ Yt, np.eye(N * N), atol=1e-9)


def test_istar_inverse_rejects_singular_input():
    with pytest.raises(SingularPartialTranspose):
        T.istar_inverse(np.zeros((4, 4)))


def test_contractions_of_a_product(rng):
    N = 3
    c = rng.normal(size=(N, N))
    d = rng.normal(size=(N, N))
    Y = np.kron(c, d)
    np.testing.assert_allclose(T.contract_forward(Y), c @ d)
    np.testing.assert_allclose(T.contract_reverse(Y), d @ c)


def test_permute_conjugate_agrees_with_dense(rng):
    N = 3
    op = random_op(rng, N)
    sigma = [2, 0, 1]
    S = T.permutation_matrix(sigma)
    SS = np.kron(S, S)
    dense = SS @ T.to_dense(op) @ SS.T
    np.testing.assert_allclose(T.to_dense(T.permute_conjugate(op, sigma)), dense)
    np.testing.assert_allclose(T.permute_conjugate(T.to_dense(op), sigma), dense)


def test_permutation_validation():
    with pytest.raises(InvalidPermutation):
        T.check_permutation([0, 0, 1])
    with pytest.raises(InvalidPermutation):
        T.check_permutation([0, 1], 3)


def test_rvee_is_flip_times_operator(rng):
    op = random_op(rng, 2)
    np.testing.assert_allclose(T.rvee(op), T.swap(2) @ T.to_dense(op))
    np.testing.assert_allclose(T.rvee(T.ZeroWeightOp.swap(3)), np.eye(9))


def test_op_on_legs_places_factors(rng):
    N = 2
    A = rng.normal(size=(N, N))
    I = np.eye(N)
    np.testing.assert_allclose(T.op_on_legs(A, [1], 3, N), np.kron(np.kron(I, A), I))
    P13 = T.op_on_legs(T.swap(N), [0, 2], 3, N)
    np.testing.assert_allclose(P13 @ P13, np.eye(N**3))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_dense_round_trip_property(N, seed):
    op = random_op(np.random.default_rng(seed), N)
    D = T.to_dense(op)
    assert T.from_dense(D).allclose(op)
    # zero weight: only entries with matching output multiset are set
    for r in range(N * N):
        for c in range(N * N):
            if D[r, c] != 0:
                assert sorted(divmod(r, N)) == sorted(divmod(c, N))
