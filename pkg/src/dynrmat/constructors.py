"""Closed-form quantum and classical dynamical R-matrices of gl_N type.

All quantum families return coefficient tables in the convention of
:mod:`dynrmat.tensorspace`. Classical r-matrices are stored in the same
tables (``beta[a, b]`` is the coefficient mapping ``v_a (x) v_b`` to
``v_b (x) v_a``), whatever indexing the closed formula is written in.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import thetafn
from .errors import EvaluationPole, InputError
from .tensorspace import ZeroWeightOp, check_permutation, from_dense, to_dense

__all__ = [
    "IntervalDecomposition",
    "decompose",
    "QuasiconstantTable",
    "RFamily",
    "SpectralRFamily",
    "ClassicalRFamily",
    "SpectralClassicalRFamily",
    "identity_family",
    "rational_hecke_R",
    "trig_hecke_R",
    "frt_constant_R",
    "spectral_rational_R",
    "spectral_trig_R",
    "spectral_elliptic_R",
    "classical_r",
    "classical_spectral_r",
    "POLE_GUARD",
]

# denominators smaller than this are treated as poles
POLE_GUARD = 1e-12


@dataclass(frozen=True)
class IntervalDecomposition:
    """A subset of ``{0..N-1}`` split into maximal runs of consecutive integers.

    ``intervals`` holds inclusive ``(start, end)`` pairs, 0-based.
    """

    N: int
    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        prev = -2
        for a, b in ivs:
            if not (0 <= a <= b < self.N) or a <= prev:
                raise InputError(f"intervals {ivs} are not disjoint increasing runs in 0..{self.N - 1}")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    @property
    def block(self) -> np.ndarray:
        """Block label of every index, ``-1`` outside ``X``."""
        lab = -np.ones(self.N, dtype=int)
        for k, (a, b) in enumerate(self.intervals):
            lab[a : b + 1] = k
        return lab

    def same_block(self, a: int, b: int) -> bool:
        lab = self.block
        return bool(lab[a] >= 0 and lab[a] == lab[b])

    def same_block_table(self) -> np.ndarray:
        lab = self.block
        return (lab[:, None] == lab[None, :]) & (lab[:, None] >= 0)

    @property
    def members(self) -> frozenset:
        return frozenset(i for a, b in self.intervals for i in range(a, b + 1))

    @classmethod
    def full(cls, N: int) -> "IntervalDecomposition":
        return cls(N, ((0, N - 1),))

    @classmethod
    def empty(cls, N: int) -> "IntervalDecomposition":
        return cls(N, ())


def decompose(X: Iterable[int], N: int) -> IntervalDecomposition:
    """Split ``X`` into maximal intervals. Every run is kept, singletons included."""
    xs = sorted(set(int(x) for x in X))
    if any(x < 0 or x >= N for x in xs):
        raise InputError(f"{xs} is not a subset of 0..{N - 1}")
    ivs = []
    for x in xs:
        if ivs and ivs[-1][1] == x - 1:
            ivs[-1][1] = x
        else:
            ivs.append([x, x])
    return IntervalDecomposition(N, tuple(tuple(iv) for iv in ivs))


@dataclass(frozen=True, eq=False)
class QuasiconstantTable:
    """Constant quasiconstants ``mu[a, b]`` (``a != b``).

    ``case`` is ``"additive"`` (``mu_ab = -mu_ba``) or ``"multiplicative"``
    (``mu_ab mu_ba = 1``, with ``0`` paired to ``inf``). Infinity is stored as
    ``complex(inf, 0)``; the diagonal is ignored.
    """

    case: str
    values: np.ndarray

    def __post_init__(self):
        if self.case not in ("additive", "multiplicative"):
            raise InputError(f"unknown quasiconstant case {self.case!r}")
        v = np.array(self.values, dtype=complex)
        np.fill_diagonal(v, np.nan)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @classmethod
    def zeros(cls, N: int) -> "QuasiconstantTable":
        return cls("additive", np.zeros((N, N)))

    @classmethod
    def ones(cls, N: int) -> "QuasiconstantTable":
        return cls("multiplicative", np.ones((N, N)))

    @classmethod
    def from_potential(cls, m, case: str = "additive") -> "QuasiconstantTable":
        """``mu_ab = m_a - m_b`` (additive) or ``m_a / m_b`` (multiplicative)."""
        m = np.asarray(m, dtype=complex)
        if case == "additive":
            return cls(case, m[:, None] - m[None, :])
        return cls(case, m[:, None] / m[None, :])

    def is_inf(self, a, b) -> bool:
        return bool(np.isinf(self.values[a, b]))

    def check(self, d: IntervalDecomposition | None = None, atol: float = 1e-9) -> None:
        """Raise :class:`InputError` if the (in-block) antisymmetry law fails."""
        N = self.N
        pairs = [(a, b) for a in range(N) for b in range(N) if a != b]
        if d is not None:
            pairs = [(a, b) for a, b in pairs if d.same_block(a, b)]
        for a, b in pairs:
            x, y = self.values[a, b], self.values[b, a]
            if self.case == "additive":
                if not abs(x + y) <= atol * max(1.0, abs(x)):
                    raise InputError(f"additive quasiconstants need mu_ab = -mu_ba, pair {(a, b)}")
            else:
                if np.isinf(x) or np.isinf(y):
                    if not (np.isinf(x) and y == 0) and not (np.isinf(y) and x == 0):
                        raise InputError(f"infinite quasiconstant must pair with 0, pair {(a, b)}")
                elif not abs(x * y - 1) <= atol:
                    raise InputError(f"multiplicative quasiconstants need mu_ab mu_ba = 1, pair {(a, b)}")


def _meta(family: str, **params) -> dict:
    return {"family": family, **params}


@dataclass(frozen=True, eq=False)
class RFamily:
    """An evaluatable family ``lambda -> R(lambda)`` with step ``gamma``.

    ``evaluator`` returns a :class:`ZeroWeightOp`, or a dense ``N^2 x N^2``
    matrix when ``dense_output`` is set (black-box input).
    """

    N: int
    gamma: complex
    evaluator: Callable
    meta: dict = field(default_factory=lambda: {"family": "black-box"})
    dense_output: bool = False

    def op(self, lam) -> ZeroWeightOp:
        lam = np.asarray(lam, dtype=complex)
        out = self.evaluator(lam)
        if self.dense_output:
            out = np.asarray(out, dtype=complex)
            if not np.all(np.isfinite(out)):
                raise EvaluationPole(lam.tolist())
            return from_dense(out)
        if not out.is_finite():
            raise EvaluationPole(lam.tolist())
        return out

    def dense(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        if self.dense_output:
            out = np.asarray(self.evaluator(lam), dtype=complex)
            if not np.all(np.isfinite(out)):
                raise EvaluationPole(lam.tolist())
            return out
        return to_dense(self.op(lam))

    __call__ = op

    def with_meta(self, **updates) -> "RFamily":
        return RFamily(self.N, self.gamma, self.evaluator, {**self.meta, **updates}, self.dense_output)


@dataclass(frozen=True, eq=False)
class SpectralRFamily:
    """An evaluatable family ``(z, lambda) -> R(z, lambda)``."""

    N: int
    gamma: complex
    evaluator: Callable
    meta: dict = field(default_factory=lambda: {"family": "black-box"})
    dense_output: bool = False

    def op(self, z, lam) -> ZeroWeightOp:
        lam = np.asarray(lam, dtype=complex)
        out = self.evaluator(complex(z), lam)
        if self.dense_output:
            out = np.asarray(out, dtype=complex)
            if not np.all(np.isfinite(out)):
                raise EvaluationPole({"z": complex(z), "lambda": lam.tolist()})
            return from_dense(out)
        if not out.is_finite():
            raise EvaluationPole({"z": complex(z), "lambda": lam.tolist()})
        return out

    def dense(self, z, lam) -> np.ndarray:
        if self.dense_output:
            out = np.asarray(self.evaluator(complex(z), np.asarray(lam, dtype=complex)), dtype=complex)
            if not np.all(np.isfinite(out)):
                raise EvaluationPole({"z": complex(z), "lambda": list(lam)})
            return out
        return to_dense(self.op(z, lam))

    __call__ = op

    def at(self, z) -> RFamily:
        """Freeze the spectral parameter."""
        return RFamily(self.N, self.gamma, lambda lam: self.evaluator(complex(z), lam), {**self.meta, "z": z}, self.dense_output)


@dataclass(frozen=True, eq=False)
class ClassicalRFamily:
    N: int
    evaluator: Callable
    meta: dict = field(default_factory=lambda: {"family": "black-box"})

    def op(self, lam) -> ZeroWeightOp:
        lam = np.asarray(lam, dtype=complex)
        out = self.evaluator(lam)
        if not out.is_finite():
            raise EvaluationPole(lam.tolist())
        return out

    def dense(self, lam) -> np.ndarray:
        return to_dense(self.op(lam))

    __call__ = op


@dataclass(frozen=True, eq=False)
class SpectralClassicalRFamily:
    N: int
    evaluator: Callable
    meta: dict = field(default_factory=lambda: {"family": "black-box"})

    def op(self, z, lam) -> ZeroWeightOp:
        lam = np.asarray(lam, dtype=complex)
        out = self.evaluator(complex(z), lam)
        if not out.is_finite():
            raise EvaluationPole({"z": complex(z), "lambda": lam.tolist()})
        return out

    def dense(self, z, lam) -> np.ndarray:
        return to_dense(self.op(z, lam))

    __call__ = op


def _inv(x, where):
    if abs(x) < POLE_GUARD:
        raise EvaluationPole(where)
    return 1.0 / x


def _diffs(lam):
    lam = np.asarray(lam, dtype=complex)
    return lam[:, None] - lam[None, :]


def identity_family(N: int, gamma: complex = 1.0) -> RFamily:
    op = ZeroWeightOp.identity(N)
    return RFamily(N, gamma, lambda lam: op, _meta("identity", N=N))


def rational_hecke_R(d: IntervalDecomposition, mu: QuasiconstantTable | None = None, *, step: complex = 1.0) -> RFamily:
    """Rational Hecke R-matrix with ``p = q = 1``.

    In block: ``beta_ab = 1 / (lambda_ab - mu_ab)``, ``alpha_ab = 1 + beta_ab``;
    identity elsewhere. ``step != 1`` rescales ``lambda -> lambda / step``.
    """
    N = d.N
    mu = QuasiconstantTable.zeros(N) if mu is None else mu
    if mu.case != "additive":
        raise InputError("the rational family takes additive quasiconstants")
    mu.check(d)
    same = d.same_block_table() & ~np.eye(N, dtype=bool)
    muv = np.where(same, mu.values, 0)
    step = complex(step)

    def ev(lam):
        den = _diffs(lam) / step - muv
        beta = np.zeros((N, N), dtype=complex)
        for a, b in zip(*np.nonzero(same)):
            beta[a, b] = _inv(den[a, b], lam.tolist())
        return ZeroWeightOp(1.0 + beta, beta)

    return RFamily(N, step, ev, _meta("rational_hecke", N=N, X=list(d.intervals), mu=mu, step=step))


def trig_hecke_R(d: IntervalDecomposition, epsilon: complex, mu: QuasiconstantTable | None = None, *, step: complex = 1.0) -> RFamily:
    """Trigonometric Hecke R-matrix with ``p = 1``, ``q = exp(epsilon)``."""
    N = d.N
    epsilon = complex(epsilon)
    q = cmath.exp(epsilon)
    if abs(q - 1) < 1e-14:
        raise InputError("exp(epsilon) must differ from 1")
    mu = QuasiconstantTable.ones(N) if mu is None else mu
    if mu.case != "multiplicative":
        raise InputError("the trigonometric family takes multiplicative quasiconstants")
    mu.check(d)
    same = d.same_block_table() & ~np.eye(N, dtype=bool)
    lower = np.tril(np.ones((N, N), dtype=bool), -1)  # a > b
    base = np.where(lower & ~same, 1 - q, 0).astype(complex)
    np.fill_diagonal(base, 0)
    step = complex(step)

    def ev(lam):
        beta = base.copy()
        diffs = _diffs(lam) / step
        for a, b in zip(*np.nonzero(same)):
            m = mu.values[a, b]
            beta[a, b] = (q - 1) * _inv(m * np.exp(epsilon * diffs[a, b]) - 1, lam.tolist())
        alpha = q + beta
        np.fill_diagonal(alpha, 1.0)
        return ZeroWeightOp(alpha, beta)

    return RFamily(N, step, ev, _meta("trig_hecke", N=N, X=list(d.intervals), epsilon=epsilon, mu=mu, step=step))


def frt_constant_R(sigma, q: complex) -> RFamily:
    """Constant R-matrix of the vector representation of U_q(gl_N), reordered by ``sigma``."""
    s = check_permutation(sigma)
    N = len(s)
    q = complex(q)
    if q == 0:
        raise InputError("q must be nonzero")
    before = s[:, None] < s[None, :]
    alpha = np.where(before, q, 1.0).astype(complex)
    beta = np.where(before, 0.0, 1 - q).astype(complex)
    np.fill_diagonal(alpha, 1.0)
    op = ZeroWeightOp(alpha, beta)
    return RFamily(N, 1.0, lambda lam: op, _meta("frt", N=N, sigma=s.tolist(), q=q))


def spectral_rational_R(d: IntervalDecomposition, gamma: complex) -> SpectralRFamily:
    N = d.N
    gamma = complex(gamma)
    same = d.same_block_table()

    def ev(z, lam):
        L = _diffs(lam)
        zg = _inv(z - gamma, {"z": z})
        alpha = np.full((N, N), z * zg, dtype=complex)
        beta = np.full((N, N), -gamma * zg, dtype=complex)
        for a, b in zip(*np.nonzero(same & ~np.eye(N, dtype=bool))):
            il = _inv(L[a, b], lam.tolist())
            alpha[a, b] = (L[a, b] + gamma) * z * il * zg
            beta[a, b] = (z - L[a, b]) * gamma * il * zg
        np.fill_diagonal(alpha, 1.0)
        return ZeroWeightOp(alpha, beta)

    return SpectralRFamily(N, gamma, ev, _meta("spectral_rational", N=N, X=list(d.intervals), gamma=gamma))


def spectral_trig_R(d: IntervalDecomposition, gamma: complex) -> SpectralRFamily:
    N = d.N
    gamma = complex(gamma)
    same = d.same_block_table()
    upper = np.triu(np.ones((N, N), dtype=bool), 1)  # a < b

    def ev(z, lam):
        L = _diffs(lam)
        szg = _inv(np.sin(z - gamma), {"z": z})
        sz, sg = np.sin(z), np.sin(gamma)
        alpha = np.where(upper, np.exp(-1j * gamma), np.exp(1j * gamma)) * sz * szg
        beta = -np.where(upper, np.exp(1j * z), np.exp(-1j * z)) * sg * szg
        alpha = alpha.astype(complex)
        beta = beta.astype(complex)
        for a, b in zip(*np.nonzero(same & ~np.eye(N, dtype=bool))):
            il = _inv(np.sin(L[a, b]), lam.tolist())
            alpha[a, b] = np.sin(L[a, b] + gamma) * sz * il * szg
            beta[a, b] = np.sin(z - L[a, b]) * sg * il * szg
        np.fill_diagonal(alpha, 1.0)
        return ZeroWeightOp(alpha, beta)

    return SpectralRFamily(N, gamma, ev, _meta("spectral_trig", N=N, X=list(d.intervals), gamma=gamma))


def spectral_elliptic_R(N: int, gamma: complex, p: thetafn.EllipticParams) -> SpectralRFamily:
    """Felder's elliptic R-matrix (full interval)."""
    gamma = complex(gamma)
    th = lambda x: thetafn.theta(x, p)
    tg = th(gamma)

    def ev(z, lam):
        L = _diffs(lam)
        tz, tzg = th(z), th(z - gamma)
        izg = _inv(tzg, {"z": z})
        alpha = np.ones((N, N), dtype=complex)
        beta = np.zeros((N, N), dtype=complex)
        for a in range(N):
            for b in range(N):
                if a == b:
                    continue
                il = _inv(th(L[a, b]), lam.tolist())
                alpha[a, b] = th(L[a, b] + gamma) * tz * il * izg
                beta[a, b] = th(z - L[a, b]) * tg * izg * il
        return ZeroWeightOp(alpha, beta)

    return SpectralRFamily(N, gamma, ev, _meta("spectral_elliptic", N=N, gamma=gamma, tau=p.tau))


def classical_r(kind: str, d: IntervalDecomposition) -> ClassicalRFamily:
    """Classical dynamical r-matrices without spectral parameter.

    ``kind="rational"``: zero coupling constant. ``kind="trig"``: coupling
    constant 2, with ``cotanh = cosh / sinh``.
    """
    N = d.N
    same = d.same_block_table() & ~np.eye(N, dtype=bool)
    if kind == "rational":

        def ev(lam):
            L = _diffs(lam)
            beta = np.zeros((N, N), dtype=complex)
            for a, b in zip(*np.nonzero(same)):
                # E_ba (x) E_ab sends v_a (x) v_b to v_b (x) v_a
                beta[a, b] = _inv(L[b, a], lam.tolist())
            return ZeroWeightOp(np.zeros((N, N)), beta)

    elif kind == "trig":
        upper = np.triu(np.ones((N, N), dtype=bool), 1)

        def ev(lam):
            L = _diffs(lam)
            coeff = np.where(upper, -1.0, 1.0).astype(complex)
            for a, b in zip(*np.nonzero(same)):
                coeff[a, b] = np.cosh(L[b, a]) * _inv(np.sinh(L[b, a]), lam.tolist())
            return ZeroWeightOp(np.eye(N), 1.0 + coeff)

    else:
        raise InputError(f"unknown classical kind {kind!r}")
    return ClassicalRFamily(N, ev, _meta(f"classical_{kind}", N=N, X=list(d.intervals)))


def classical_spectral_r(kind: str, d: IntervalDecomposition | None = None, p: thetafn.EllipticParams | None = None, *, N: int | None = None) -> SpectralClassicalRFamily:
    """Classical r-matrices with spectral parameter (elliptic, trig, rational).

    The closed formulas use ``E_ab (x) E_ba`` with coefficient ``b_ab``; that
    coefficient lands in ``beta[b, a]`` of the stored table.
    """
    if d is None:
        if N is None:
            raise InputError("need a decomposition or N")
        d = IntervalDecomposition.full(N)
    N = d.N
    same = d.same_block_table() & ~np.eye(N, dtype=bool)
    off = ~np.eye(N, dtype=bool)
    if kind == "elliptic":
        if p is None:
            raise InputError("the elliptic r-matrix needs EllipticParams")

        def ev(z, lam):
            L = _diffs(lam)
            alpha = np.eye(N) * thetafn.rho(z, p)
            beta = np.zeros((N, N), dtype=complex)
            for a, b in zip(*np.nonzero(off)):
                beta[b, a] = thetafn.sigma_w(z, L[b, a], p)
            return ZeroWeightOp(alpha, beta)

    elif kind == "trig":

        def ev(z, lam):
            L = _diffs(lam)
            isz = _inv(np.sin(z), {"z": z})
            alpha = np.eye(N) * np.cos(z) * isz
            beta = np.zeros((N, N), dtype=complex)
            for a, b in zip(*np.nonzero(off)):
                if same[a, b]:
                    # sign fixed by the residue condition and CDYB, see notes
                    c = np.sin(L[a, b] + z) * _inv(np.sin(L[a, b]), lam.tolist()) * isz
                elif a < b:
                    c = np.exp(-1j * z) * isz
                else:
                    c = np.exp(1j * z) * isz
                beta[b, a] = c
            return ZeroWeightOp(alpha, beta)

    elif kind == "rational":

        def ev(z, lam):
            L = _diffs(lam)
            iz = _inv(z, {"z": z})
            alpha = np.eye(N) * iz
            beta = np.full((N, N), iz, dtype=complex)
            for a, b in zip(*np.nonzero(same)):
                beta[b, a] += _inv(L[a, b], lam.tolist())
            return ZeroWeightOp(alpha, beta)

    else:
        raise InputError(f"unknown spectral classical kind {kind!r}")
    meta = _meta(f"classical_spectral_{kind}", N=N, X=list(d.intervals))
    if p is not None:
        meta["tau"] = p.tau
    return SpectralClassicalRFamily(N, ev, meta)
