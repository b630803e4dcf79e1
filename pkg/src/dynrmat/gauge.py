"""Multiplicative forms, the difference differential and gauge transformations.

A multiplicative ``k``-form assigns a nowhere-vanishing function to each
ordered ``k``-tuple of distinct indices; swapping two adjacent indices
inverts the value. ``d_gamma`` is the multiplicative analogue of the
exterior derivative built from ``delta_a f = f(lam) / f(lam - gamma e_a)``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import constructors as cons
from . import verify
from .errors import DivisionByZero, InputError, NotClosedForm, StencilValidationFailed
from .tensorspace import ZeroWeightOp, check_permutation, from_dense, max_abs, permute_conjugate

__all__ = [
    "perm_sign",
    "QuadraticPotential",
    "DifferentialForm",
    "MultiplicativeForm",
    "delta_a",
    "d_gamma",
    "check_gamma_closed",
    "quantize_closed_form",
    "polynomial_one_form",
    "GaugeMove",
    "inverse_move",
    "inverse_chain",
    "gauge_constant",
    "gauge_spectral",
    "apply_chain",
    "STENCILS",
    "select_stencil",
    "gauge_fixing_two_form",
    "gauge_classical",
    "classical_limit_family",
]


def perm_sign(idx) -> tuple[tuple, int]:
    """Sorted copy of ``idx`` and the parity of the sorting permutation."""
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return tuple(sorted(idx)), sign


@dataclass(frozen=True, eq=False)
class QuadraticPotential:
    """``psi(lam) = lam^T M lam + v^T lam + c`` with exact derivatives."""

    M: np.ndarray
    v: np.ndarray | None = None
    c: complex = 0.0

    def __post_init__(self):
        M = np.array(self.M, dtype=complex)
        v = np.zeros(M.shape[0], dtype=complex) if self.v is None else np.array(self.v, dtype=complex)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "v", v)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return complex(lam @ self.M @ lam + self.v @ lam + self.c)

    def grad(self, lam):
        return (self.M + self.M.T) @ np.asarray(lam, dtype=complex) + self.v

    def hess(self, lam=None):
        return self.M + self.M.T

    def to_json(self):
        return {"M": _cjson(self.M), "v": _cjson(self.v), "c": _cjson(self.c)}

    @classmethod
    def from_json(cls, d):
        return cls(_cload(d["M"]), _cload(d.get("v")) if d.get("v") is not None else None, _cload(d.get("c", [0, 0])))


def _cjson(x):
    x = np.asarray(x, dtype=complex)
    return np.stack([x.real, x.imag], axis=-1).tolist()


def _cload(x):
    if x is None:
        return None
    a = np.asarray(x, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


@dataclass(frozen=True, eq=False)
class DifferentialForm:
    """A ``k``-form ``sum C_{a_1..a_k} dx_{a_1} ^ ... ^ dx_{a_k}``.

    ``component(idx, lam)`` is called with increasing tuples only; other
    orderings follow by antisymmetry. For ``k = 0`` the tuple is empty.
    """

    k: int
    N: int
    component: Callable
    meta: dict = field(default_factory=dict)

    def __call__(self, idx, lam) -> complex:
        idx = tuple(idx)
        if len(set(idx)) < len(idx):
            return 0.0
        s, sign = perm_sign(idx)
        return sign * self.component(s, np.asarray(lam, dtype=complex))

    @classmethod
    def zero(cls, k: int, N: int) -> "DifferentialForm":
        return cls(k, N, lambda idx, lam: 0.0, {"type": "zero"})

    @classmethod
    def constant(cls, A) -> "DifferentialForm":
        """Constant 2-form from an antisymmetric matrix (upper triangle used)."""
        A = np.array(A, dtype=complex)
        return cls(2, A.shape[0], lambda idx, lam: A[idx], {"type": "constant", "A": _cjson(A)})


def polynomial_one_form(A, B=None) -> DifferentialForm:
    """``E_a(lam) = sum_b A[a,b] lam_b + sum_{b,c} B[a,b,c] lam_b lam_c``."""
    A = np.array(A, dtype=complex)
    N = A.shape[0]
    B = np.zeros((N, N, N), dtype=complex) if B is None else np.array(B, dtype=complex)

    def comp(idx, lam):
        (a,) = idx
        return A[a] @ lam + lam @ B[a] @ lam

    return DifferentialForm(1, N, comp, {"type": "polynomial", "A": _cjson(A), "B": _cjson(B)})


@dataclass(frozen=True, eq=False)
class MultiplicativeForm:
    """A multiplicative ``k``-form.

    With ``antisymmetrize`` set, ``component`` is only evaluated on
    increasing tuples and odd reorderings invert it, so the inversion law
    holds by construction. Otherwise ``component`` defines every ordering
    and the law is a property to be checked.
    """

    k: int
    N: int
    component: Callable
    antisymmetrize: bool = True
    meta: dict = field(default_factory=dict)

    def __call__(self, idx, lam) -> complex:
        lam = np.asarray(lam, dtype=complex)
        idx = tuple(idx)
        if not self.antisymmetrize:
            return self.component(idx, lam)
        s, sign = perm_sign(idx)
        v = self.component(s, lam)
        if sign < 0:
            if v == 0:
                raise DivisionByZero(f"component {s} vanishes at {lam}")
            return 1.0 / v
        return v

    def table(self, lam) -> np.ndarray:
        """``N x N`` table of a 2-form (diagonal set to 1)."""
        if self.k != 2:
            raise InputError("table() is for 2-forms")
        T = np.ones((self.N, self.N), dtype=complex)
        for a, b in itertools.permutations(range(self.N), 2):
            T[a, b] = self(( a, b), lam)
        return T

    def inverse(self) -> "MultiplicativeForm":
        return MultiplicativeForm(self.k, self.N, lambda idx, lam: 1.0 / self.component(idx, lam), self.antisymmetrize, {"type": "inverse", "of": self.meta})

    @classmethod
    def ones(cls, k: int, N: int) -> "MultiplicativeForm":
        return cls(k, N, lambda idx, lam: 1.0, True, {"type": "ones"})

    def antisymmetry_residual(self, spec: verify.SampleSpec | None = None) -> verify.Residual:
        """Max of ``|phi_{..ba..} phi_{..ab..} - 1|`` over samples and tuples."""
        spec = spec or verify.SampleSpec(count=8)
        tuples = list(itertools.permutations(range(self.N), self.k))

        def ev(pt):
            lam = pt["lambda"]
            worst = 0.0
            for t in tuples:
                for i in range(self.k - 1):
                    u = list(t)
                    u[i], u[i + 1] = u[i + 1], u[i]
                    worst = max(worst, abs(self(t, lam) * self(tuple(u), lam) - 1))
            return worst

        return verify.sweep(ev, verify._lam_draw(self.N, spec), spec)


def delta_a(f: Callable, a: int, gamma: complex) -> Callable:
    """``lam -> f(lam) / f(lam - gamma e_a)``."""

    def g(lam):
        lam = np.asarray(lam, dtype=complex)
        sh = lam.copy()
        sh[a] -= gamma
        den = f(sh)
        if den == 0:
            raise DivisionByZero(f"f vanishes at {sh}")
        return f(lam) / den

    return g


def d_gamma(phi: MultiplicativeForm, gamma: complex) -> MultiplicativeForm:
    r"""``(d phi)_{a_1..a_{k+1}} = prod_i (delta_{a_i} phi_{..\hat a_i..})^{(-1)^{i+1}}``."""
    k = phi.k
    if k + 1 > phi.N:
        raise InputError(f"no {k + 1}-forms on a space of dimension {phi.N}")

    def comp(idx, lam):
        out = 1.0 + 0j
        for i, a in enumerate(idx):
            rest = idx[:i] + idx[i + 1 :]
            v = delta_a(lambda l: phi(rest, l), a, gamma)(lam)
            if i % 2 == 0:
                out *= v
            else:
                if v == 0:
                    raise DivisionByZero(f"delta factor vanishes at {lam}")
                out /= v
        return out

    return MultiplicativeForm(k + 1, phi.N, comp, False, {"type": "d_gamma", "gamma": gamma, "of": phi.meta})


def check_gamma_closed(phi: MultiplicativeForm, gamma: complex, spec: verify.SampleSpec | None = None) -> verify.Residual:
    """Max ``|(d_gamma phi) - 1|`` over sampled points and increasing tuples."""
    spec = spec or verify.SampleSpec(count=8)
    if phi.k + 1 > phi.N:
        return verify.Residual(0.0, None, 0, 0, spec.seed)
    dphi = d_gamma(phi, gamma)
    tuples = list(itertools.combinations(range(phi.N), phi.k + 1))

    def ev(pt):
        return max(abs(dphi(t, pt["lambda"]) - 1) for t in tuples)

    return verify.sweep(ev, verify._lam_draw(phi.N, spec), spec)


def quantize_closed_form(E: DifferentialForm, gamma: complex) -> MultiplicativeForm:
    """``phi = d_gamma(exp(-E))``, a gamma-closed form quantizing ``C = dE``."""
    theta = MultiplicativeForm(E.k, E.N, lambda idx, lam: np.exp(-E.component(idx, lam)), True, {"type": "exp", "E": E.meta})
    out = d_gamma(theta, gamma)
    return MultiplicativeForm(out.k, out.N, out.component, False, {"type": "quantized", "gamma": gamma, "E": E.meta})


# ---------------------------------------------------------------------------
# gauge moves


@dataclass(frozen=True, eq=False)
class GaugeMove:
    """One gauge transformation.

    ``kind`` is one of ``two_form``, ``perm``, ``scale``, ``affine`` (both
    settings), ``psi`` and ``scale_fn`` (spectral only), and for classical
    r-matrices ``closed_two_form``, ``shift``, ``perm``, ``rescale``,
    ``add_identity``, ``psi``. ``payload`` holds the parameters.
    """

    kind: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for k, v in self.payload.items():
            if isinstance(v, (MultiplicativeForm, DifferentialForm)):
                if "E" in v.meta or v.meta.get("type") in ("constant", "polynomial", "quantized", "gauge_fixing"):
                    out[k] = _jsonable_meta(v.meta)
                else:
                    out[k] = {"type": "opaque"}
            elif isinstance(v, QuadraticPotential):
                out[k] = v.to_json()
            elif callable(v):
                out[k] = {"type": "opaque"}
            elif isinstance(v, (complex, np.complexfloating)) or (isinstance(v, np.ndarray) and np.iscomplexobj(v)):
                out[k] = _cjson(v)
            elif isinstance(v, np.ndarray):
                out[k] = v.tolist()
            else:
                out[k] = v
        return out

    @classmethod
    def from_json(cls, d: dict, N: int, gamma: complex = 1.0) -> "GaugeMove":
        """Rebuild a move. Forms are accepted as quantized polynomial potentials."""
        d = dict(d)
        kind = d.pop("kind", None)
        if kind is None:
            raise InputError("gauge move without 'kind'")
        if kind == "two_form":
            f = d.get("form") or {}
            if f.get("type") != "quantized":
                raise InputError("two_form payloads must be quantized polynomial potentials")
            E = f["E"]
            g = _cload(f["gamma"]) if isinstance(f["gamma"], list) else complex(f["gamma"])
            return cls(kind, {"form": quantize_closed_form(polynomial_one_form(_cload(E["A"]), _cload(E["B"])), g)})
        if kind == "perm":
            return cls(kind, {"sigma": check_permutation(np.asarray(d["sigma"], dtype=int), N)})
        if kind in ("scale", "rescale", "add_identity"):
            return cls(kind, {"c": _num(d["c"])})
        if kind == "affine":
            return cls(kind, {"c": _num(d.get("c", 1)), "b": _num(d.get("b", 1)), "mu": _cload(d["mu"]) if d.get("mu") is not None else np.zeros(N)})
        if kind == "shift":
            return cls(kind, {"mu": _cload(d["mu"])})
        if kind == "psi":
            return cls(kind, {"psi": QuadraticPotential.from_json(d["psi"]), "stencil": d.get("stencil", "auto")})
        if kind == "scale_fn":
            return cls(kind, {"exp": _num(d["exp"])})
        if kind == "closed_two_form":
            return cls(kind, {"form": DifferentialForm.constant(_cload(d["form"]["A"]))})
        raise InputError(f"unknown gauge move kind {kind!r}")


def _num(x):
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _jsonable_meta(m):
    if isinstance(m, dict):
        return {k: _jsonable_meta(v) for k, v in m.items()}
    if isinstance(m, (complex, np.complexfloating)):
        return [float(m.real), float(m.imag)]
    if isinstance(m, np.ndarray):
        return m.tolist()
    return m


def inverse_move(move: GaugeMove) -> GaugeMove:
    k, p = move.kind, move.payload
    if k == "two_form":
        return GaugeMove(k, {"form": p["form"].inverse()})
    if k == "perm":
        s = check_permutation(p["sigma"])
        return GaugeMove(k, {"sigma": np.argsort(s)})
    if k == "scale":
        return GaugeMove(k, {"c": 1.0 / complex(p["c"])})
    if k == "affine":
        c = complex(p.get("c", 1))
        b = complex(p.get("b", 1))
        mu = np.asarray(p.get("mu", 0), dtype=complex)
        return GaugeMove(k, {"c": 1 / c, "b": 1 / b, "mu": -mu / c})
    if k == "psi":
        psi = p["psi"]
        neg = QuadraticPotential(-psi.M, -psi.v, -psi.c) if isinstance(psi, QuadraticPotential) else (lambda lam: -psi(lam))
        return GaugeMove(k, {**p, "psi": neg})
    if k == "scale_fn":
        if "exp" in p:
            return GaugeMove(k, {"exp": -complex(p["exp"])})
        c = p["c"]
        return GaugeMove(k, {"c": lambda z: 1.0 / c(z)})
    raise InputError(f"no inverse for move {k!r}")


def inverse_chain(chain) -> list:
    return [inverse_move(m) for m in reversed(list(chain))]


def _chain_meta(meta, move):
    chain = list(meta.get("gauge_chain", []))
    chain.append(move.to_json())
    return {**meta, "gauge_chain": chain}


def _form_table(form: MultiplicativeForm, lam, N):
    T = np.ones((N, N), dtype=complex)
    for a, b in itertools.permutations(range(N), 2):
        T[a, b] = form((a, b), lam)
    return T


def _require_closed(form, gamma, N, check_spec):
    if form.N != N or form.k != 2:
        raise NotClosedForm("two_form payload must be a 2-form on the same space")
    if check_spec is None:
        return
    r = check_gamma_closed(form, gamma, check_spec)
    if r.max_abs > 1e-8:
        raise NotClosedForm(f"the 2-form is not {gamma}-closed (residual {r.max_abs:.3e})")


_CHECK = verify.SampleSpec(count=3, seed=12345, radius=1.0)


def gauge_constant(fam: cons.RFamily, move: GaugeMove, *, check_spec: verify.SampleSpec | None = _CHECK) -> cons.RFamily:
    """Apply a gauge move to a family without spectral parameter."""
    N, g = fam.N, fam.gamma
    k, p = move.kind, move.payload
    meta = _chain_meta(fam.meta, move)
    if k == "two_form":
        form = p["form"]
        _require_closed(form, g, N, check_spec)

        def ev(lam):
            op = fam.op(lam)
            return ZeroWeightOp(op.alpha * _form_table(form, lam, N), op.beta)

        return cons.RFamily(N, g, ev, meta)
    if k == "perm":
        s = check_permutation(p["sigma"], N)
        return cons.RFamily(N, g, lambda lam: permute_conjugate(fam.op(np.asarray(lam)[s]), s), meta)
    if k == "scale":
        c = complex(p["c"])
        if c == 0:
            raise InputError("scale factor must be nonzero")

        def ev(lam):
            op = fam.op(lam)
            return ZeroWeightOp(c * op.alpha, c * op.beta)

        return cons.RFamily(N, g, ev, meta)
    if k == "affine":
        c = complex(p.get("c", 1))
        if c == 0:
            raise InputError("affine factor must be nonzero")
        mu = np.broadcast_to(np.asarray(p.get("mu", 0), dtype=complex), (N,)).copy()
        return cons.RFamily(N, g / c, lambda lam: fam.op(c * np.asarray(lam) + mu), meta)
    raise InputError(f"move {k!r} does not apply to constant families")


# stencil variants of the spectral psi-move: (name, alpha exponent, beta exponent)
def _st_sym(psi, lam, a, b, s):
    ea, eb = np.eye(len(lam))[a] * s, np.eye(len(lam))[b] * s
    return psi(lam) - psi(lam - ea) - psi(lam - eb) + psi(lam - ea - eb)


def _st_literal(psi, lam, a, b, s):
    ea, eb = np.eye(len(lam))[a] * s, np.eye(len(lam))[b] * s
    return psi(lam) - 2 * psi(lam - ea) + psi(lam - ea - eb)


def _st_anti(psi, lam, a, b, s):
    ea, eb = np.eye(len(lam))[a] * s, np.eye(len(lam))[b] * s
    return psi(lam - eb) - psi(lam - ea)


def _st_anti_rev(psi, lam, a, b, s):
    return -_st_anti(psi, lam, a, b, s)


_BETA_STENCILS = {"literal": _st_literal, "symmetric": _st_sym, "antisym": _st_anti, "antisym_rev": _st_anti_rev}
STENCILS = tuple(f"{name}:{unit}" for name in _BETA_STENCILS for unit in ("unit", "gamma"))


def _psi_tables(psi, lam, z, gamma, stencil):
    name, unit = stencil.split(":")
    s = 1.0 if unit == "unit" else gamma
    N = len(lam)
    A = np.empty((N, N), dtype=complex)
    B = np.zeros((N, N), dtype=complex)
    for a in range(N):
        for b in range(N):
            A[a, b] = np.exp(z * _st_sym(psi, lam, a, b, s))
            if a != b:
                B[a, b] = np.exp(z * _BETA_STENCILS[name](psi, lam, a, b, s))
    return A, B


def _psi_move(fam, psi, stencil, meta):
    def ev(z, lam):
        op = fam.op(z, lam)
        A, B = _psi_tables(psi, np.asarray(lam, dtype=complex), z, fam.gamma, stencil)
        return ZeroWeightOp(op.alpha * A, op.beta * B)

    return cons.SpectralRFamily(fam.N, fam.gamma, ev, meta)


@functools.lru_cache(maxsize=None)
def select_stencil(tol: float = 1e-8) -> str:
    """The stencil variant under which the psi-move preserves QDYB.

    Every candidate in :data:`STENCILS` is applied to the rational spectral
    family (``N = 3``, step 0.7) with a fixed non-degenerate quadratic
    ``psi``; exactly one must keep the residual below ``tol``.
    """
    N = 3
    base = cons.spectral_rational_R(cons.IntervalDecomposition.full(N), 0.7)
    psi = QuadraticPotential(np.array([[0.3, 0.1, -0.2], [0.0, -0.4, 0.25], [0.15, 0.0, 0.2]]), np.array([0.1, -0.3, 0.2]))
    spec = verify.SampleSpec(count=4, seed=2024, radius=1.5, z_radius=0.8)
    good = []
    for st in STENCILS:
        r = verify.check_qdyb_spectral(_psi_move(base, psi, st, {}), spec)
        if r.max_abs < tol:
            good.append(st)
    if len(good) != 1:
        raise StencilValidationFailed(f"expected one valid stencil, found {good}")
    return good[0]


def gauge_spectral(fam: cons.SpectralRFamily, move: GaugeMove, *, check_spec: verify.SampleSpec | None = _CHECK) -> cons.SpectralRFamily:
    """Apply a gauge move to a family with spectral parameter."""
    N, g = fam.N, fam.gamma
    k, p = move.kind, move.payload
    if k == "psi":
        st = p.get("stencil", "auto")
        if st == "auto":
            st = select_stencil()
        elif st not in STENCILS:
            raise InputError(f"unknown stencil {st!r}")
        move = GaugeMove(k, {**p, "stencil": st})
        return _psi_move(fam, p["psi"], st, _chain_meta(fam.meta, move))
    meta = _chain_meta(fam.meta, move)
    if k == "two_form":
        form = p["form"]
        _require_closed(form, g, N, check_spec)

        def ev(z, lam):
            op = fam.op(z, lam)
            return ZeroWeightOp(op.alpha * _form_table(form, lam, N), op.beta)

        return cons.SpectralRFamily(N, g, ev, meta)
    if k == "perm":
        s = check_permutation(p["sigma"], N)
        return cons.SpectralRFamily(N, g, lambda z, lam: permute_conjugate(fam.op(z, np.asarray(lam)[s]), s), meta)
    if k in ("scale_fn", "scale"):
        if k == "scale":
            c = lambda z, c0=complex(p["c"]): c0
        elif "exp" in p:
            c = lambda z, a=complex(p["exp"]): np.exp(a * z)
        else:
            c = p["c"]

        def ev(z, lam):
            op = fam.op(z, lam)
            cz = c(z)
            return ZeroWeightOp(cz * op.alpha, cz * op.beta)

        return cons.SpectralRFamily(N, g, ev, meta)
    if k == "affine":
        c = complex(p.get("c", 1))
        b = complex(p.get("b", 1))
        if c == 0 or b == 0:
            raise InputError("affine factors must be nonzero")
        mu = np.broadcast_to(np.asarray(p.get("mu", 0), dtype=complex), (N,)).copy()
        return cons.SpectralRFamily(N, g / c, lambda z, lam: fam.op(b * z, c * np.asarray(lam) + mu), meta)
    raise InputError(f"move {k!r} does not apply to spectral families")


def apply_chain(fam, chain, **kw):
    f = gauge_spectral if isinstance(fam, cons.SpectralRFamily) else gauge_constant
    if isinstance(fam, (cons.ClassicalRFamily, cons.SpectralClassicalRFamily)):
        f = gauge_classical
    for m in chain:
        fam = f(fam, m, **kw)
    return fam


def gauge_fixing_two_form(fam: cons.RFamily, q=None, spec: verify.SampleSpec | None = None):
    """The form ``phi_ac = (q + beta_ac) / alpha_ac`` and the fixed family.

    The family must have step 1 and ``p = 1``. Multiplying ``alpha`` by
    ``phi`` gives ``alpha_ac = q + beta_ac`` exactly. ``q`` is measured when
    not given.
    """
    N = fam.N
    if q is None:
        q = verify.check_hecke(fam, spec=spec or verify.SampleSpec(count=8)).q
    q = complex(q)

    def comp(idx, lam):
        a, c = idx
        op = fam.op(lam)
        if abs(op.alpha[a, c]) < 1e-12 * max(1.0, abs(q)):
            raise DivisionByZero(f"alpha_{a}{c} vanishes at {lam}")
        return (q + op.beta[a, c]) / op.alpha[a, c]

    phi = MultiplicativeForm(2, N, comp, False, {"type": "gauge_fixing", "q": q})
    move = GaugeMove("two_form", {"form": phi})

    def ev(lam):
        op = fam.op(lam)
        alpha = q + op.beta
        np.fill_diagonal(alpha, np.diag(op.alpha))
        return ZeroWeightOp(alpha, op.beta)

    return phi, cons.RFamily(N, fam.gamma, ev, _chain_meta(fam.meta, move))


def _fd_closed_residual(form: DifferentialForm, lam, h=1e-4):
    """``|d form|`` for a 2-form, by central differences."""
    N = form.N
    worst = 0.0
    for a, b, c in itertools.combinations(range(N), 3):
        tot = 0.0
        for i, j, kk, sgn in ((a, b, c, 1), (b, a, c, -1), (c, a, b, 1)):
            e = np.zeros(N)
            e[i] = h
            tot += sgn * (form((j, kk), lam + e) - form((j, kk), lam - e)) / (2 * h)
        worst = max(worst, abs(tot))
    return worst


def gauge_classical(fam, move: GaugeMove, *, check_spec: verify.SampleSpec | None = _CHECK):
    """Gauge moves of classical r-matrices, constant or spectral.

    Kinds: ``closed_two_form`` (add ``psi_ab`` to ``alpha_ab``),
    ``shift`` (``r(lam + mu)``), ``perm``, ``rescale`` (``c r(c lam)``),
    ``add_identity`` (constant ``c`` or odd ``f(z)``), and for spectral
    r-matrices ``psi`` (add ``z d_a d_b psi`` to ``alpha_ab`` and multiply
    the ``E_ab (x) E_ba`` coefficient by ``exp(z (d_a psi - d_b psi))``).
    """
    N = fam.N
    spectral = isinstance(fam, cons.SpectralClassicalRFamily)
    k, p = move.kind, move.payload
    meta = _chain_meta(fam.meta, move)
    if spectral:
        wrap = lambda f: cons.SpectralClassicalRFamily(N, f, meta)
        call = lambda z, lam: fam.op(z, lam)
    else:
        wrap = lambda f: cons.ClassicalRFamily(N, lambda lam: f(None, lam), meta)
        call = lambda z, lam: fam.op(lam)
    if k == "closed_two_form":
        form = p["form"]
        if check_spec is not None and N >= 3:
            rng = check_spec.rng(0)
            for _ in range(check_spec.count):
                lam = check_spec.lam(rng, N)
                if _fd_closed_residual(form, lam) > 1e-6:
                    raise NotClosedForm("the 2-form is not closed")

        def ev(z, lam):
            op = call(z, lam)
            T = np.zeros((N, N), dtype=complex)
            for a, b in itertools.permutations(range(N), 2):
                T[a, b] = form((a, b), lam)
            return ZeroWeightOp(op.alpha + T, op.beta)

        return wrap(ev)
    if k == "shift":
        mu = np.asarray(p["mu"], dtype=complex)
        return wrap(lambda z, lam: call(z, np.asarray(lam) + mu))
    if k == "perm":
        s = check_permutation(p["sigma"], N)
        return wrap(lambda z, lam: permute_conjugate(call(z, np.asarray(lam)[s]), s))
    if k == "rescale":
        c = complex(p["c"])

        def ev(z, lam):
            op = call(z, c * np.asarray(lam))
            return ZeroWeightOp(c * op.alpha, c * op.beta)

        return wrap(ev)
    if k == "add_identity":
        f = p.get("f")
        if f is None:
            c0 = complex(p["c"])
            f = lambda z: c0
        elif spectral and check_spec is not None:
            for w in (0.31 + 0.2j, 0.7 - 0.1j):
                if abs(f(w) + f(-w)) > 1e-10 * max(1.0, abs(f(w))):
                    raise InputError("the added scalar function must be odd")

        def ev(z, lam):
            op = call(z, lam)
            return ZeroWeightOp(op.alpha + f(z), op.beta)

        return wrap(ev)
    if k == "psi":
        if not spectral:
            raise InputError("the psi move needs a spectral parameter")
        psi = p["psi"]

        def ev(z, lam):
            lam = np.asarray(lam, dtype=complex)
            op = call(z, lam)
            g = psi.grad(lam)
            H = psi.hess(lam)
            # beta[x, y] multiplies E_yx (x) E_xy, the E_ab (x) E_ba term with a = y
            Bf = np.exp(z * (g[None, :] - g[:, None]))
            return ZeroWeightOp(op.alpha + z * H, op.beta * Bf)

        return wrap(ev)
    raise InputError(f"move {k!r} does not apply to classical r-matrices")


def classical_limit_family(fam_of_gamma: Callable, N: int, *, spectral: bool = False, steps=(1e-2, 5e-3)):
    """Classical family whose value is the numerical limit ``(Id - R_g) / g``.

    ``fam_of_gamma(g)`` builds the quantum family at step ``g``.
    """
    def lim(z, lam):
        pt = {"lambda": lam} if z is None else {"lambda": lam, "z": z}
        est, _ = verify.quasiclassical_limit(fam_of_gamma, pt, steps=steps)
        return from_dense(est, tol=1e-6 * max(1.0, max_abs(est)))

    if spectral:
        return cons.SpectralClassicalRFamily(N, lim, {"family": "classical_limit"})
    return cons.ClassicalRFamily(N, lambda lam: lim(None, lam), {"family": "classical_limit"})
