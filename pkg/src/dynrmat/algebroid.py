"""Representations of a dynamical R-matrix, rigidity and the relations of A_R.

An L-operator representation is a weighted space ``W`` with a zero-weight
operator ``L(lam)`` on ``V (x) W``. Basis vector ``v_a`` of ``V`` carries the
weight ``omega_a = e_a``; the weights of ``W`` are rows of an array with
``N`` columns. Dense operators on several legs use row-major multi-indices
with the first leg slowest.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constructors as cons
from . import verify
from .errors import (
    EvaluationPole,
    InputError,
    NotInvertible,
    OracleMismatch,
    RankUnstable,
    SingularInput,
)
from .tensorspace import ZeroWeightOp, contract_forward, contract_reverse, istar_inverse, max_abs

__all__ = [
    "LOperatorRep",
    "trivial_rep",
    "basic_rep",
    "check_rll",
    "check_intertwiner",
    "tensor_rep",
    "gauge_rep",
    "dual_rep",
    "dual_morphism",
    "tilde_R",
    "RigidityData",
    "compute_rigidity",
    "rigidity_oracle",
    "closed_form_Q_trig",
    "cauchy_det_check",
    "tau",
    "check_crossing",
    "RelationInstance",
    "relation_list",
    "relation_vectors",
    "structured_vector",
    "PBWReport",
    "pbw_rank_check",
]

COND_MAX = 1e12


# ---------------------------------------------------------------------------
# multi-leg helpers


def _place(M, legs, dims) -> np.ndarray:
    """Embed ``M`` (acting on ``legs`` in that order) into the full space."""
    n = len(dims)
    legs = list(legs)
    rest = [l for l in range(n) if l not in legs]
    order = legs + rest
    d_rest = int(np.prod([dims[l] for l in rest])) if rest else 1
    big = np.kron(np.asarray(M, dtype=complex), np.eye(d_rest))
    shp = [dims[l] for l in order]
    T = big.reshape(shp + shp)
    inv = list(np.argsort(order))
    D = int(np.prod(dims))
    return T.transpose(inv + [n + i for i in inv]).reshape(D, D)


def _leg_index(dims, leg):
    """Basis index on ``leg`` of every flat index."""
    return np.indices(dims).reshape(len(dims), -1)[leg]


def _spectator_shift(func, lam, gamma, legs, dims, leg, wts, sign) -> np.ndarray:
    """``func`` on ``legs`` evaluated at ``lam + sign gamma h^{(leg)}``; ``leg`` is a spectator."""
    lam = np.asarray(lam, dtype=complex)
    D = int(np.prod(dims))
    out = np.zeros((D, D), dtype=complex)
    idx = _leg_index(dims, leg)
    for s in range(dims[leg]):
        cols = np.nonzero(idx == s)[0]
        full = _place(_finite(func(lam + sign * gamma * wts[s]), lam), legs, dims)
        out[:, cols] = full[:, cols]
    return out


def _self_shift(func, lam, gamma, dims, leg, wts, sign) -> np.ndarray:
    """``X(lam + sign gamma h^{(leg)})`` where ``X`` acts on every leg.

    The weight is read from the input vector on ``leg``.
    """
    lam = np.asarray(lam, dtype=complex)
    D = int(np.prod(dims))
    out = np.zeros((D, D), dtype=complex)
    idx = _leg_index(dims, leg)
    cache = {}
    for s in range(dims[leg]):
        key = tuple(np.round(wts[s], 14))
        if key not in cache:
            cache[key] = _finite(func(lam + sign * gamma * wts[s]), lam)
        cols = np.nonzero(idx == s)[0]
        out[:, cols] = cache[key][:, cols]
    return out


def _finite(M, lam):
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise EvaluationPole(np.asarray(lam).tolist())
    return M


def _t2(X, d1, d2) -> np.ndarray:
    """Transpose in the second factor of an operator on ``C^d1 (x) C^d2``."""
    return np.asarray(X).reshape(d1, d2, d1, d2).transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)


def _inv(X, what="operator"):
    c = np.linalg.cond(X)
    if not np.isfinite(c) or c > COND_MAX:
        raise NotInvertible(f"{what} is numerically singular (condition {c:.3e})")
    return np.linalg.inv(X)


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True, eq=False)
class LOperatorRep:
    """``(W, L)`` with ``L(lam)`` dense on ``V (x) W``."""

    N: int
    gamma: complex
    weights: np.ndarray
    L: Callable
    name: str = "rep"

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=complex))
        if w.shape[1] != self.N:
            raise InputError(f"weights need {self.N} columns, got shape {w.shape}")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def __call__(self, lam) -> np.ndarray:
        return _finite(self.L(np.asarray(lam, dtype=complex)), lam)

    def zero_weight_residual(self, lam) -> float:
        """Largest entry of ``L(lam)`` connecting different total weights."""
        V = np.eye(self.N)
        tot = (V[:, None, :] + self.weights[None, :, :]).reshape(-1, self.N)
        mask = np.any(np.abs(tot[:, None, :] - tot[None, :, :]) > 1e-12, axis=2)
        return float(np.max(np.abs(self(lam)[mask]), initial=0.0))


def trivial_rep(N: int, gamma: complex = 1.0) -> LOperatorRep:
    I = np.eye(N, dtype=complex)
    return LOperatorRep(N, complex(gamma), np.zeros((1, N)), lambda lam: I, "trivial")


def basic_rep(fam: cons.RFamily) -> LOperatorRep:
    """``W = V`` and ``L = R``."""
    return LOperatorRep(fam.N, complex(fam.gamma), np.eye(fam.N), fam.dense, "basic")


def _v_weights(N):
    return np.eye(N, dtype=complex)


def check_rll(rep: LOperatorRep, fam: cons.RFamily, spec: verify.SampleSpec | None = None) -> verify.Residual:
    """Residual of ``R12(l - g h3) L13(l) L23(l - g h1) = L23(l) L13(l - g h2) R12(l)``."""
    spec = spec or verify.SampleSpec()
    N, g = fam.N, complex(fam.gamma)
    dims = (N, N, rep.dim)
    vw = _v_weights(N)

    def ev(pt):
        lam = pt["lambda"]
        lhs = (
            _spectator_shift(fam.dense, lam, g, (0, 1), dims, 2, rep.weights, -1)
            @ _place(rep(lam), (0, 2), dims)
            @ _spectator_shift(rep, lam, g, (1, 2), dims, 0, vw, -1)
        )
        rhs = (
            _place(rep(lam), (1, 2), dims)
            @ _spectator_shift(rep, lam, g, (0, 2), dims, 1, vw, -1)
            @ _place(fam.dense(lam), (0, 1), dims)
        )
        verify.guard(lhs, spec)
        return max_abs(lhs - rhs)

    return verify.sweep(ev, verify._lam_draw(N, spec), spec)


def check_intertwiner(A: Callable, repW: LOperatorRep, repU: LOperatorRep, spec: verify.SampleSpec | None = None) -> verify.Residual:
    """Residual of ``(1 (x) A(l)) L_W(l) - L_U(l) (1 (x) A(l - g h1))``."""
    spec = spec or verify.SampleSpec()
    N, g = repW.N, repW.gamma
    vw = _v_weights(N)

    def ev(pt):
        lam = pt["lambda"]
        Al = np.asarray(A(lam), dtype=complex)
        if Al.shape != (repU.dim, repW.dim):
            raise InputError(f"A must map W (dim {repW.dim}) to U (dim {repU.dim})")
        left = np.kron(np.eye(N), Al) @ repW(lam)
        shifted = np.zeros((N * repU.dim, N * repW.dim), dtype=complex)
        for a in range(N):
            Aa = np.asarray(A(lam - g * vw[a]), dtype=complex)
            shifted[a * repU.dim : (a + 1) * repU.dim, a * repW.dim : (a + 1) * repW.dim] = Aa
        return max_abs(left - repU(lam) @ shifted)

    return verify.sweep(ev, verify._lam_draw(N, spec), spec)


def tensor_rep(repW: LOperatorRep, repU: LOperatorRep) -> LOperatorRep:
    """``L_{W (x) U}(l) = L_W^{12}(l - g h3) L_U^{13}(l)`` on ``V (x) W (x) U``."""
    if repW.N != repU.N:
        raise InputError("representations of different families")
    N, g = repW.N, repW.gamma
    dims = (N, repW.dim, repU.dim)
    wts = (repW.weights[:, None, :] + repU.weights[None, :, :]).reshape(-1, N)

    def L(lam):
        return _spectator_shift(repW, lam, g, (0, 1), dims, 2, repU.weights, -1) @ _place(repU(lam), (0, 2), dims)

    return LOperatorRep(N, g, wts, L, f"({repW.name}*{repU.name})")


def gauge_rep(rep: LOperatorRep, A: Callable) -> LOperatorRep:
    """``L^A(l) = (1 (x) A(l)^{-1}) L(l) (1 (x) A(l - g h1))``."""
    N, g, n = rep.N, rep.gamma, rep.dim

    def L(lam):
        Ainv = _inv(np.asarray(A(lam), dtype=complex), "A")
        shifted = np.zeros((N * n, N * n), dtype=complex)
        for a in range(N):
            shifted[a * n : (a + 1) * n, a * n : (a + 1) * n] = A(lam - g * np.eye(N)[a])
        return np.kron(np.eye(N), Ainv) @ rep(lam) @ shifted

    return LOperatorRep(N, g, rep.weights, L, f"{rep.name}^A")


def dual_rep(rep: LOperatorRep, side: str = "right") -> LOperatorRep:
    """Right dual ``L^{-1}(l + g h2)^{t2}`` or left dual ``L^{t2}(l - g h2)^{-1}``.

    The dual space carries the negated weights.
    """
    N, g, n = rep.N, rep.gamma, rep.dim
    dims = (N, n)
    if side == "right":

        def L(lam):
            M = _self_shift(lambda l: _inv(rep(l), "L"), lam, g, dims, 1, rep.weights, +1)
            return _t2(M, N, n)

    elif side == "left":
        dual_w = -rep.weights

        def L(lam):
            M = _self_shift(lambda l: _t2(rep(l), N, n), lam, g, dims, 1, dual_w, -1)
            return _inv(M, "L^t2")

    else:
        raise InputError(f"side must be 'right' or 'left', got {side!r}")
    return LOperatorRep(N, g, -rep.weights, L, f"{rep.name}^*{side[0]}")


def dual_morphism(A: Callable, weights_src, gamma) -> Callable:
    """``A^*(l) = A(l + g h)^t`` for ``A: W1 -> W2`` of weight zero.

    ``weights_src`` are the weights of ``W1``; the result maps ``W2^*`` to
    ``W1^*``.
    """
    w = np.atleast_2d(np.asarray(weights_src, dtype=complex))

    def As(lam):
        lam = np.asarray(lam, dtype=complex)
        cols = [np.asarray(A(lam + gamma * w[i]), dtype=complex)[:, i] for i in range(len(w))]
        return np.array(cols)

    return As


# ---------------------------------------------------------------------------
# rigidity and crossing


def tilde_R(fam: cons.RFamily) -> cons.RFamily:
    """Shift each coefficient by ``gamma`` times the weight of its second output leg."""
    N, g = fam.N, complex(fam.gamma)
    E = np.eye(N)

    def ev(lam):
        lam = np.asarray(lam, dtype=complex)
        alpha = np.empty((N, N), dtype=complex)
        beta = np.zeros((N, N), dtype=complex)
        for b in range(N):
            op = fam.op(lam + g * E[b])
            alpha[:, b] = op.alpha[:, b]
        for a in range(N):
            op = fam.op(lam + g * E[a])
            beta[a, :] = op.beta[a, :]
        np.fill_diagonal(beta, 0)
        return ZeroWeightOp(alpha, beta)

    return cons.RFamily(N, g, ev, {**fam.meta, "tilde": True})


def _tilde_dense_oracle(fam, lam):
    """Entrywise shift of the dense matrix: row ``(i, j)`` is evaluated at ``lam + g omega_j``."""
    N, g = fam.N, complex(fam.gamma)
    out = np.zeros((N * N, N * N), dtype=complex)
    for j in range(N):
        D = fam.dense(np.asarray(lam, dtype=complex) + g * np.eye(N)[j])
        rows = [i * N + j for i in range(N)]
        out[rows, :] = D[rows, :]
    return out


@dataclass(frozen=True)
class RigidityData:
    Q: np.ndarray
    Qp: np.ndarray
    cond: float
    oracle_deviation: float | None = None

    def to_json(self) -> dict:
        d = lambda M: [[float(np.real(x)), float(np.imag(x))] for x in np.diag(M)]
        return {"Q": d(self.Q), "Qp": d(self.Qp), "cond": self.cond, "oracle_deviation": self.oracle_deviation}


def rigidity_oracle(fam: cons.RFamily, lam) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of ``Q`` and ``Q'`` from the two linear systems.

    ``Q_a + sum_{b != a} beta_ab(l + g w_a) Q_b = 1`` and
    ``P_a + sum_{b != a} beta_ba(l + g w_b) P_b = 1`` with
    ``Q'_a(l) = P_a(l - g w_a)``. ``Q'`` is ``None`` when a shifted
    system is singular.
    """
    N, g = fam.N, complex(fam.gamma)
    E = np.eye(N)
    lam = np.asarray(lam, dtype=complex)

    def q_system(l):
        M = np.eye(N, dtype=complex)
        for a in range(N):
            bt = fam.op(l + g * E[a]).beta
            for b in range(N):
                if b != a:
                    M[a, b] = bt[a, b]
        return np.linalg.solve(M, np.ones(N))

    def p_system(l):
        M = np.eye(N, dtype=complex)
        for b in range(N):
            bt = fam.op(l + g * E[b]).beta
            for a in range(N):
                if b != a:
                    M[a, b] = bt[b, a]
        return np.linalg.solve(M, np.ones(N))

    Q = q_system(lam)
    try:
        Qp = np.array([p_system(lam - g * E[a])[a] for a in range(N)])
    except EvaluationPole:
        # the shifted system can hit a pole where Q' itself is finite
        Qp = None
    return Q, Qp


def compute_rigidity(fam: cons.RFamily, lam, *, oracle_tol: float | None = 1e-9) -> RigidityData:
    """``Q`` and ``Q'`` from ``Y = i_*(R~) = sum c_i (x) d_i``.

    ``Q(l) = sum d_i c_i`` at ``l``. The forward contraction
    ``sum c_i d_i`` at ``l`` equals ``Q'(l + g h)``, so ``Q'_a(l)`` is read
    from it at ``l - g w_a``. Entries of ``Q'`` whose shifted point is a
    pole are ``nan``. With ``oracle_tol`` set the result is compared with
    :func:`rigidity_oracle` and :class:`OracleMismatch` is raised on
    disagreement.
    """
    N, g = fam.N, complex(fam.gamma)
    lam = np.asarray(lam, dtype=complex)
    rt = tilde_R(fam)
    Q = contract_reverse(istar_inverse(rt.dense(lam), N), N)
    qp = np.full(N, np.nan, dtype=complex)
    for a in range(N):
        try:
            qp[a] = contract_forward(istar_inverse(rt.dense(lam - g * np.eye(N)[a]), N), N)[a, a]
        except EvaluationPole:
            pass
    Qp = np.diag(qp)
    cond = float(np.linalg.cond(Q))
    dev = None
    if oracle_tol is not None:
        q_or, qp_or = rigidity_oracle(fam, lam)
        dev = max_abs(Q - np.diag(q_or))
        if qp_or is not None and np.all(np.isfinite(qp)):
            dev = max(dev, max_abs(qp - qp_or))
        if dev > oracle_tol * max(1.0, max_abs(Q)):
            raise OracleMismatch(f"contraction and linear-system routes differ by {dev:.3e}")
    return RigidityData(Q, Qp, cond, dev)


def closed_form_Q_trig(lam, q, N: int | None = None) -> RigidityData:
    """Product formulas for the full trigonometric family with unit quasiconstants.

    ``Q_a = prod_{i != a} (q^{1 + l_i} - q^{l_a}) / (q^{l_i} - q^{l_a})`` and
    ``Q'_a = q^{N-1} / Q_a``.
    """
    lam = np.asarray(lam, dtype=complex)
    N = len(lam) if N is None else N
    q = complex(q)
    ql = q**lam
    Q = np.ones(N, dtype=complex)
    for a in range(N):
        for i in range(N):
            if i == a:
                continue
            den = ql[i] - ql[a]
            if abs(den) < 1e-14:
                raise EvaluationPole(f"q^lam_{i} = q^lam_{a}")
            Q[a] *= (q * ql[i] - ql[a]) / den
    return RigidityData(np.diag(Q), np.diag(q ** (N - 1) / Q), float(np.linalg.cond(np.diag(Q))))


def cauchy_det_check(x, y):
    """``det(1/(x_i - y_j))`` against ``prod_{i<j}(x_i - x_j)(y_j - y_i) / prod(x_i - y_j)``.

    Returns ``(lhs, rhs, relative_error)``.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n = len(x)
    if len(y) != n or n == 0:
        raise SingularInput("x and y need the same positive length")
    diff = x[:, None] - y[None, :]
    if np.any(diff == 0) or len(set(x.tolist())) < n or len(set(y.tolist())) < n:
        raise SingularInput("need x_i != y_j and distinct entries")
    lhs = complex(np.linalg.det(1.0 / diff))
    num = 1.0 + 0j
    for i, j in itertools.combinations(range(n), 2):
        num *= (x[i] - x[j]) * (y[j] - y[i])
    rhs = complex(num / np.prod(diff))
    return lhs, rhs, abs(lhs - rhs) / max(abs(rhs), 1e-300)


def tau(func: Callable, N: int, gamma, weights=None) -> tuple[Callable, np.ndarray]:
    """``tau(X)(l) = X^{-1}(l + g h2)^{t2}`` for ``X`` on ``V (x) W``.

    ``weights`` are those of the second leg (default ``V``); returns the new
    function and the negated weights.
    """
    w = np.eye(N) if weights is None else weights
    rep = dual_rep(LOperatorRep(N, complex(gamma), w, func), "right")
    return rep.L, rep.weights


def check_crossing(fam: cons.RFamily, spec: verify.SampleSpec | None = None, *, Q: Callable | None = None) -> verify.Residual:
    """Residual of ``tau^2(R)(l) = (Q(l - g h2) (x) 1) R(l) (Q^{-1}(l) (x) 1)``.

    ``Q`` defaults to the contraction route; pass another callable
    (returning an ``N x N`` matrix) for negative controls.
    """
    spec = spec or verify.SampleSpec()
    N, g = fam.N, complex(fam.gamma)
    Qf = Q or (lambda l: compute_rigidity(fam, l, oracle_tol=None).Q)
    r1 = dual_rep(LOperatorRep(N, g, np.eye(N), fam.dense), "right")
    t2 = dual_rep(r1, "right").L
    dims = (N, N)

    def ev(pt):
        lam = pt["lambda"]
        lhs = t2(lam)
        left = _spectator_shift(Qf, lam, g, (0,), dims, 1, np.eye(N), -1)
        rhs = left @ fam.dense(lam) @ np.kron(_inv(Qf(lam), "Q"), np.eye(N))
        return max_abs(lhs - rhs)

    return verify.sweep(ev, verify._lam_draw(N, spec), spec)


# ---------------------------------------------------------------------------
# relations of A_R


@dataclass(frozen=True)
class RelationInstance:
    """Degree-2 relation for indices ``(a, c, b, d)`` as a vector in ``(End V)^{(x)2}``.

    Entry ``(i, j, k, l)`` (row-major) is the coefficient of ``L_ij L_kl``.
    """

    indices: tuple
    vector: np.ndarray


def _monomial(N, i, j, k, l):
    return ((i * N + j) * N + k) * N + l


def relation_vectors(R1: np.ndarray, R2: np.ndarray, N: int) -> np.ndarray:
    """All ``N^4`` degree-2 relations as rows, from dense ``R(l1)`` and ``R(l2)``.

    ``sum_xy R^{xy}_{ac}(l1) L_xb L_yd - sum_xy R^{bd}_{xy}(l2) L_cy L_ax`` with
    ``R(v_x (x) v_y) = sum R^{xy}_{ac} v_a (x) v_c``.
    """
    T1 = np.asarray(R1).reshape(N, N, N, N)  # [a, c, x, y]: R^{xy}_{ac}
    T2 = np.asarray(R2).reshape(N, N, N, N)  # [x, y, b, d]: R^{bd}_{xy}
    out = np.zeros((N, N, N, N, N, N, N, N), dtype=complex)  # (a,c,b,d) x (i,j,k,l)
    for u, v in itertools.product(range(N), repeat=2):
        # first sum: L_xb L_yd, monomial (x, b, y, d) with (b, d) = (u, v)
        out[:, :, u, v, :, u, :, v] += T1
        # second sum: L_cy L_ax, monomial (c, y, a, x) with (a, c) = (u, v)
        out[u, v, :, :, v, :, u, :] -= T2.transpose(2, 3, 1, 0)
    return out.reshape(N**4, N**4)


def _coeff(x):
    return [float(np.real(x)), float(np.imag(x))]


def relation_list(fam: cons.RFamily, lam1, lam2) -> tuple[list, list]:
    """Degree-2 relation instances and the structured relation records.

    Structured kinds: ``exchange`` (moment-map commutation, coefficients are
    the shift vectors), ``same_row``, ``same_col``, ``cross`` (coefficients
    evaluated at the given point) and ``inverse``. With
    ``R = sum alpha_ab E_aa (x) E_bb + sum beta_ab E_ba (x) E_ab`` they read

    * ``L_as L_at = alpha_st(l2) / (1 - beta_st(l2)) L_at L_as``
    * ``L_bs L_as = alpha_ab(l1) / (1 - beta_ba(l1)) L_as L_bs``
    * ``alpha_ab(l1) L_as L_bt - alpha_st(l2) L_bt L_as = (beta_st(l2) - beta_ba(l1)) L_bs L_at``

    and each lies in the span of the degree-2 instances.
    """
    N, g = fam.N, complex(fam.gamma)
    lam1 = np.asarray(lam1, dtype=complex)
    lam2 = np.asarray(lam2, dtype=complex)
    rows = relation_vectors(fam.dense(lam1), fam.dense(lam2), N)
    inst = [RelationInstance(idx, rows[n]) for n, idx in enumerate(itertools.product(range(N), repeat=4))]
    o1, o2 = fam.op(lam1), fam.op(lam2)
    recs = [{"kind": "inverse", "indices": [], "coeff": "L L^-1 = L^-1 L = 1"}]
    E = np.eye(N)
    for b, c in itertools.product(range(N), repeat=2):
        recs.append({"kind": "exchange", "indices": [b, c], "coeff": {"lambda1_shift": (g * E[b]).tolist(), "lambda2_shift": (g * E[c]).tolist()}})
    for a in range(N):
        for s, t in itertools.permutations(range(N), 2):
            den = 1 - o2.beta[s, t]
            recs.append({"kind": "same_row", "indices": [a, s, a, t], "coeff": _coeff(o2.alpha[s, t] / den) if den != 0 else None})
    for s in range(N):
        for a, b in itertools.permutations(range(N), 2):
            den = 1 - o1.beta[b, a]
            recs.append({"kind": "same_col", "indices": [b, s, a, s], "coeff": _coeff(o1.alpha[a, b] / den) if den != 0 else None})
    for a, b in itertools.permutations(range(N), 2):
        for s, t in itertools.permutations(range(N), 2):
            recs.append(
                {
                    "kind": "cross",
                    "indices": [a, b, s, t],
                    "coeff": {
                        "L_as L_bt": _coeff(o1.alpha[a, b]),
                        "L_bt L_as": _coeff(-o2.alpha[s, t]),
                        "L_bs L_at": _coeff(o1.beta[b, a] - o2.beta[s, t]),
                    },
                }
            )
    return inst, recs


def structured_vector(rec: dict, N: int) -> np.ndarray | None:
    """A ``same_row``/``same_col``/``cross`` record as a vector of ``L L`` coefficients."""
    v = np.zeros(N**4, dtype=complex)
    c = lambda x: complex(x[0], x[1])
    k = rec["kind"]
    if rec.get("coeff") is None:
        return None
    if k == "same_row":
        a, s, _, t = rec["indices"]
        v[_monomial(N, a, s, a, t)] += 1
        v[_monomial(N, a, t, a, s)] -= c(rec["coeff"])
    elif k == "same_col":
        b, s, a, _ = rec["indices"]
        v[_monomial(N, b, s, a, s)] += 1
        v[_monomial(N, a, s, b, s)] -= c(rec["coeff"])
    elif k == "cross":
        a, b, s, t = rec["indices"]
        cf = rec["coeff"]
        v[_monomial(N, a, s, b, t)] += c(cf["L_as L_bt"])
        v[_monomial(N, b, t, a, s)] += c(cf["L_bt L_as"])
        v[_monomial(N, b, s, a, t)] += c(cf["L_bs L_at"])
    else:
        return None
    return v


@dataclass(frozen=True)
class PBWReport:
    degree: int
    rank: int
    quotient_dim: int
    expected_quotient: int
    ranks: tuple

    @property
    def passes(self) -> bool:
        return self.quotient_dim == self.expected_quotient

    def __iter__(self):
        return iter((self.rank, self.quotient_dim, self.expected_quotient))

    def to_json(self) -> dict:
        return {"degree": self.degree, "rank": self.rank, "quotient_dim": self.quotient_dim, "expected_quotient": self.expected_quotient, "ranks": list(self.ranks)}


def _numeric_rank(M, rel=1e-8) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))


def _degree3_rows(fam, lam1, lam2, shift_sign):
    N, g = fam.N, complex(fam.gamma)
    E = np.eye(N)
    n2 = N**2
    blocks = []
    base = relation_vectors(fam.dense(lam1), fam.dense(lam2), N)
    # r (x) L_uv: trailing generator, no shift
    blocks.append(np.kron(base, np.eye(n2)))
    # L_uv (x) r: coefficients re-evaluated at shifted moment maps
    for u, v in itertools.product(range(N), repeat=2):
        r = relation_vectors(fam.dense(lam1 + shift_sign * g * E[u]), fam.dense(lam2 + shift_sign * g * E[v]), N)
        e = np.zeros((1, n2))
        e[0, u * N + v] = 1
        blocks.append(np.kron(e, r))
    return np.vstack(blocks)


def pbw_rank_check(fam: cons.RFamily, degree: int = 2, trials: int = 3, spec: verify.SampleSpec | None = None, *, shift_sign: int = -1) -> PBWReport:
    """Numeric rank of the relation span in degree 2 or 3 at generic points.

    Degree 3 spans ``L_uv * r`` (with ``r`` re-evaluated at
    ``(l1 + s g w_u, l2 + s g w_v)``, ``s = shift_sign``) and ``r * L_uv``.
    The expected quotient dimension is ``C(N^2 + n - 1, n)``.
    """
    if degree not in (2, 3):
        raise InputError("degree must be 2 or 3")
    if trials < 3:
        raise InputError("at least three trials are needed for a stability check")
    spec = spec or verify.SampleSpec(radius=1.5)
    N = fam.N
    n2 = N**2
    ranks = []
    rng = spec.rng(31)
    for _ in range(trials):
        tries = 0
        while True:
            tries += 1
            lam1, lam2 = spec.lam(rng, N), spec.lam(rng, N)
            try:
                if degree == 2:
                    M = relation_vectors(fam.dense(lam1), fam.dense(lam2), N)
                else:
                    M = _degree3_rows(fam, lam1, lam2, shift_sign)
                break
            except EvaluationPole:
                if tries > spec.max_resample_factor:
                    raise
        ranks.append(_numeric_rank(M))
    if len(set(ranks)) != 1:
        raise RankUnstable(ranks)
    rank = ranks[0]
    total = n2**degree
    return PBWReport(degree, rank, total - rank, math.comb(n2 + degree - 1, degree), tuple(ranks))
