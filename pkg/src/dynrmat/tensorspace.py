"""Weight-graded linear algebra on tensor powers of the vector representation.

Conventions
-----------
* ``V = C^N`` with basis ``v_0, ..., v_{N-1}``; ``v_a`` has weight ``omega_a``,
  the ``a``-th coordinate vector of ``h* = C^N``. Indices are 0-based in the
  Python API (the CLI and JSON files use 1-based labels).
* Operators on ``V^{(x)n}`` are dense ``N^n x N^n`` complex arrays indexed
  row-major over the multi-index ``(a_1, ..., a_n)``, i.e. the flat index of
  ``v_{a_1} (x) ... (x) v_{a_n}`` is ``((a_1 N + a_2) N + ...) + a_n``.
* A zero-weight operator on ``V (x) V`` is stored compactly as two ``N x N``
  tables::

      R = sum_{a,b} alpha[a,b] E_aa (x) E_bb + sum_{a != b} beta[a,b] E_ba (x) E_ab

  so that ``R (v_a (x) v_b) = alpha[a,b] v_a (x) v_b + beta[a,b] v_b (x) v_a``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EvaluationPole,
    InvalidPermutation,
    NotZeroWeight,
    SingularPartialTranspose,
)

__all__ = [
    "ZeroWeightOp",
    "weight",
    "to_dense",
    "from_dense",
    "swap",
    "rvee",
    "op_on_legs",
    "embed_with_shift",
    "partial_transpose",
    "partial_dualize_t2",
    "istar_inverse",
    "contract_reverse",
    "contract_forward",
    "check_permutation",
    "permutation_matrix",
    "permute_conjugate",
    "max_abs",
    "TAU_ZW",
]

TAU_ZW = 1e-12


@dataclass(frozen=True, eq=False)
class ZeroWeightOp:
    """Coefficient tables of a zero-weight operator on ``V (x) V``.

    The diagonal of ``beta`` is forced to zero on construction.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=complex)
        beta = np.array(self.beta, dtype=complex)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1] or alpha.shape != beta.shape:
            raise ValueError("alpha and beta must be square tables of equal shape")
        np.fill_diagonal(beta, 0.0)
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def N(self) -> int:
        return self.alpha.shape[0]

    @classmethod
    def identity(cls, N: int) -> "ZeroWeightOp":
        return cls(np.ones((N, N)), np.zeros((N, N)))

    @classmethod
    def swap(cls, N: int) -> "ZeroWeightOp":
        """The coefficient pattern of the flip ``P``."""
        return cls(np.eye(N), np.ones((N, N)))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.alpha)) and np.all(np.isfinite(self.beta)))

    def allclose(self, other: "ZeroWeightOp", atol=1e-12) -> bool:
        return bool(
            np.allclose(self.alpha, other.alpha, rtol=0, atol=atol)
            and np.allclose(self.beta, other.beta, rtol=0, atol=atol)
        )

    def __eq__(self, other):
        if not isinstance(other, ZeroWeightOp):
            return NotImplemented
        return bool(np.array_equal(self.alpha, other.alpha) and np.array_equal(self.beta, other.beta))

    def __repr__(self):
        return f"ZeroWeightOp(N={self.N}, alpha={self.alpha.tolist()}, beta={self.beta.tolist()})"


def weight(a: int, N: int) -> np.ndarray:
    """Weight ``omega_a`` of ``v_a`` as a coordinate vector."""
    w = np.zeros(N)
    w[a] = 1.0
    return w


def max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def to_dense(op: ZeroWeightOp) -> np.ndarray:
    N = op.N
    D = np.zeros((N * N, N * N), dtype=complex)
    a, b = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    a, b = a.ravel(), b.ravel()
    D[a * N + b, a * N + b] = op.alpha[a, b]
    off = a != b
    D[b[off] * N + a[off], a[off] * N + b[off]] = op.beta[a[off], b[off]]
    return D


def from_dense(D, tol: float | None = None) -> ZeroWeightOp:
    """Extract ``(alpha, beta)`` from a dense zero-weight operator on ``V (x) V``.

    ``tol`` is absolute; the default is ``TAU_ZW * max|D|``.
    """
    D = np.asarray(D, dtype=complex)
    N = int(round(np.sqrt(D.shape[0])))
    if D.shape != (N * N, N * N):
        raise ValueError(f"expected a 2-leg operator, got shape {D.shape}")
    if tol is None:
        tol = TAU_ZW * max(max_abs(D), 1.0)
    op = _extract(D, N)
    resid = D - to_dense(op)
    worst = np.unravel_index(np.argmax(np.abs(resid)), resid.shape)
    if abs(resid[worst]) > tol:
        r, c = int(worst[0]), int(worst[1])
        idx = ((r // N, r % N), (c // N, c % N))
        raise NotZeroWeight(float(abs(resid[worst])), idx)
    return op


def _extract(D, N):
    alpha = np.empty((N, N), dtype=complex)
    beta = np.zeros((N, N), dtype=complex)
    for a in range(N):
        for b in range(N):
            alpha[a, b] = D[a * N + b, a * N + b]
            if a != b:
                beta[a, b] = D[b * N + a, a * N + b]
    return ZeroWeightOp(alpha, beta)


def swap(N: int) -> np.ndarray:
    """Dense flip ``P`` on ``V (x) V``."""
    return to_dense(ZeroWeightOp.swap(N))


def rvee(op: ZeroWeightOp) -> np.ndarray:
    return swap(op.N) @ to_dense(op)


def op_on_legs(M, legs: Sequence[int], n: int, N: int) -> np.ndarray:
    """Embed an operator on ``len(legs)`` tensor factors into ``V^{(x)n}``.

    ``legs`` are 0-based and need not be increasing; the first tensor factor
    of ``M`` acts on ``legs[0]`` and so on.
    """
    k = len(legs)
    M = np.asarray(M, dtype=complex).reshape((N,) * (2 * k))
    letters = "abcdefghijklmnopqrstuvwxyz"
    out_idx = list(letters[:n])
    in_idx = list(letters[n : 2 * n])
    m_out = [out_idx[l] for l in legs]
    m_in = [in_idx[l] for l in legs]
    operands = [M]
    subs = ["".join(m_out + m_in)]
    eye = np.eye(N)
    for l in range(n):
        if l not in legs:
            operands.append(eye)
            subs.append(out_idx[l] + in_idx[l])
    expr = ",".join(subs) + "->" + "".join(out_idx + in_idx)
    T = np.einsum(expr, *operands)
    return T.reshape(N**n, N**n)


def _columns_with(N: int, n: int, legs: Sequence[int], values: Sequence[int]) -> np.ndarray:
    idx = np.indices((N,) * n).reshape(n, -1)
    mask = np.ones(idx.shape[1], dtype=bool)
    for l, v in zip(legs, values):
        mask &= idx[l] == v
    return np.nonzero(mask)[0]


def embed_with_shift(
    fam: Callable[[np.ndarray], np.ndarray],
    legs: Sequence[int],
    shift_legs: Sequence[int],
    sign: int,
    lam,
    gamma: complex,
    n: int,
    N: int,
) -> np.ndarray:
    """Embed ``fam`` on ``legs`` of ``V^{(x)n}`` with a dynamical shift.

    On the block where the legs in ``shift_legs`` carry basis vectors
    ``v_{c_1}, ...``, ``fam`` is evaluated at
    ``lam + sign * gamma * (omega_{c_1} + ...)``. ``fam`` maps a weight
    vector to a dense operator on ``len(legs)`` factors.
    """
    lam = np.asarray(lam, dtype=complex)
    shift_legs = list(shift_legs)
    if set(shift_legs) & set(legs):
        raise ValueError("shift legs must be disjoint from the acting legs")
    if not shift_legs:
        return op_on_legs(_checked(fam, lam), legs, n, N)
    out = np.zeros((N**n, N**n), dtype=complex)
    for cs in itertools.product(range(N), repeat=len(shift_legs)):
        arg = lam.copy()
        for c in cs:
            arg[c] += sign * gamma
        block = op_on_legs(_checked(fam, arg), legs, n, N)
        cols = _columns_with(N, n, shift_legs, cs)
        out[:, cols] = block[:, cols]
    return out


def _checked(fam, arg):
    M = np.asarray(fam(arg), dtype=complex)
    if not np.all(np.isfinite(M)):
        raise EvaluationPole(np.asarray(arg).tolist())
    return M


def partial_transpose(D, N: int, leg: int = 1, n: int = 2) -> np.ndarray:
    """Transpose in one tensor factor (0-based ``leg``)."""
    T = np.asarray(D).reshape((N,) * (2 * n))
    axes = list(range(2 * n))
    axes[leg], axes[n + leg] = axes[n + leg], axes[leg]
    return T.transpose(axes).reshape(N**n, N**n)


def partial_dualize_t2(D, N: int | None = None) -> np.ndarray:
    """Transpose in the second factor of a 2-leg operator.

    ``(t2 D)[(a,b'),(c,d')] = D[(a,d'),(c,b')]``.
    """
    D = np.asarray(D)
    if N is None:
        N = int(round(np.sqrt(D.shape[0])))
    return partial_transpose(D, N, leg=1, n=2)


def istar_inverse(X, N: int | None = None, *, cond_max: float = 1e12) -> np.ndarray:
    """Inverse of ``X`` in ``End(V) (x) End(V)^op``.

    Computed as ``((X^{t2})^{-1})^{t2}``; raises
    :class:`SingularPartialTranspose` when ``X^{t2}`` is numerically singular.
    """
    X = np.asarray(X, dtype=complex)
    if N is None:
        N = int(round(np.sqrt(X.shape[0])))
    Xt = partial_dualize_t2(X, N)
    c = np.linalg.cond(Xt)
    if not np.isfinite(c) or c > cond_max:
        raise SingularPartialTranspose(f"condition number of X^t2 is {c:.3e}")
    return partial_dualize_t2(np.linalg.inv(Xt), N)


def contract_reverse(Y, N: int | None = None) -> np.ndarray:
    """For ``Y = sum c_i (x) d_i`` return ``sum d_i c_i``."""
    Y = np.asarray(Y)
    if N is None:
        N = int(round(np.sqrt(Y.shape[0])))
    T = Y.reshape(N, N, N, N)  # [out1, out2, in1, in2]
    return np.einsum("imni->mn", T)


def contract_forward(Y, N: int | None = None) -> np.ndarray:
    """For ``Y = sum c_i (x) d_i`` return ``sum c_i d_i``."""
    Y = np.asarray(Y)
    if N is None:
        N = int(round(np.sqrt(Y.shape[0])))
    T = Y.reshape(N, N, N, N)
    return np.einsum("miin->mn", T)


def check_permutation(sigma, N: int | None = None) -> np.ndarray:
    s = np.asarray(sigma)
    if s.ndim != 1 or (N is not None and len(s) != N):
        raise InvalidPermutation(f"expected a permutation of length {N}, got {sigma!r}")
    if not np.issubdtype(s.dtype, np.integer) or sorted(s.tolist()) != list(range(len(s))):
        raise InvalidPermutation(f"{sigma!r} is not a permutation of 0..{len(s) - 1}")
    return s.astype(int)


def permutation_matrix(sigma) -> np.ndarray:
    """Matrix of ``v_a -> v_{sigma[a]}``."""
    s = check_permutation(sigma)
    S = np.zeros((len(s), len(s)))
    S[s, np.arange(len(s))] = 1.0
    return S


def permute_conjugate(D, sigma):
    """``(S (x) ... (x) S) D (S^-1 (x) ... (x) S^-1)`` with ``S v_a = v_{sigma[a]}``.

    Accepts a :class:`ZeroWeightOp` (returned as such) or a dense operator
    on any number of legs.
    """
    if isinstance(D, ZeroWeightOp):
        s = check_permutation(sigma, D.N)
        alpha = np.empty_like(D.alpha)
        beta = np.empty_like(D.beta)
        alpha[np.ix_(s, s)] = D.alpha
        beta[np.ix_(s, s)] = D.beta
        return ZeroWeightOp(alpha, beta)
    D = np.asarray(D, dtype=complex)
    s = check_permutation(sigma)
    N = len(s)
    n = int(round(np.log(D.shape[0]) / np.log(N))) if N > 1 else 1
    if N**n != D.shape[0]:
        raise InvalidPermutation(f"permutation of length {N} does not match operator size {D.shape[0]}")
    S = permutation_matrix(s)
    Sn = S
    for _ in range(n - 1):
        Sn = np.kron(Sn, S)
    return Sn @ D @ Sn.T
