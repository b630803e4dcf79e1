"""Residual-based checks of the defining identities.

Every check draws points from a :class:`SampleSpec`, evaluates one residual
per point and reduces by ``max``. Points at which a family has a pole (or
overflows) are discarded and redrawn; see :func:`sweep`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import constructors as cons
from . import thetafn
from .errors import (
    DerivativeUnstable,
    EvaluationPole,
    ExtrapolationUnstable,
    FitFailure,
    InconsistentP,
    InputError,
    LimitNotReached,
    NonFiniteResidual,
    PoleAtArgument,
)
from .tensorspace import ZeroWeightOp, embed_with_shift, max_abs, op_on_legs, swap

__all__ = [
    "SampleSpec",
    "Residual",
    "sweep",
    "check_zero_weight",
    "check_qdyb",
    "check_qdyb_spectral",
    "check_unitarity",
    "HeckeReport",
    "check_hecke",
    "check_coordinate_relations",
    "check_cdyb",
    "CouplingReport",
    "check_classical_unitarity_and_residue",
    "quasiclassical_limit",
    "degeneration_check",
    "rho_vector",
]


@dataclass(frozen=True)
class SampleSpec:
    """How verifier sample points are drawn.

    ``lam`` coordinates are uniform in the complex disc of radius ``radius``;
    spectral parameters are uniform in the disc of radius ``z_radius`` about
    ``z_center``. Point ``k`` is drawn from ``default_rng([seed, k])`` so a
    sweep does not depend on evaluation order.
    """

    count: int = 20
    radius: float = 2.0
    z_radius: float = 1.0
    z_center: complex = 0.0
    seed: int = 0
    eta: float = 1e-3
    max_resample_factor: int = 10
    overflow: float = 1e8

    def __post_init__(self):
        if self.count < 1:
            raise InputError("sample count must be at least 1")
        if self.radius <= 0 or self.z_radius <= 0:
            raise InputError("sampling radii must be positive")

    def rng(self, k: int) -> np.random.Generator:
        return np.random.default_rng([int(self.seed), int(k)])

    def disc(self, rng, n: int, radius: float, center: complex = 0.0) -> np.ndarray:
        r = radius * np.sqrt(rng.random(n))
        t = 2 * np.pi * rng.random(n)
        return center + r * np.exp(1j * t)

    def lam(self, rng, N: int) -> np.ndarray:
        return self.disc(rng, N, self.radius)

    def z(self, rng, n: int = 1) -> np.ndarray:
        return self.disc(rng, n, self.z_radius, self.z_center)


@dataclass
class Residual:
    max_abs: float
    argmax: dict | None = None
    samples_used: int = 0
    resampled: int = 0
    seed: int | None = None
    values: list = field(default_factory=list)

    def passes(self, tol: float) -> bool:
        return bool(np.isfinite(self.max_abs) and self.max_abs < tol)

    def to_json(self, check: str, tol: float | None = None) -> dict:
        out = {
            "check": check,
            "residual": float(self.max_abs),
            "argmax": _jsonable(self.argmax),
            "samples": self.samples_used,
            "resampled": self.resampled,
            "seed": self.seed,
        }
        if tol is not None:
            out["tolerance"] = tol
            out["pass"] = self.passes(tol)
        return out

    @classmethod
    def combine(cls, parts) -> "Residual":
        parts = list(parts)
        worst = max(parts, key=lambda r: r.max_abs)
        return cls(
            worst.max_abs,
            worst.argmax,
            sum(p.samples_used for p in parts),
            sum(p.resampled for p in parts),
            worst.seed,
            [p.max_abs for p in parts],
        )


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


class _Overflow(Exception):
    pass


def guard(M, spec: SampleSpec):
    """Reject evaluations that overflow the sampling policy."""
    M = np.asarray(M)
    if not np.all(np.isfinite(M)) or (M.size and max_abs(M) > spec.overflow):
        raise _Overflow
    return M


_POLES = (EvaluationPole, PoleAtArgument, _Overflow, ZeroDivisionError, FloatingPointError)


def sweep(evaluate: Callable, draw: Callable, spec: SampleSpec) -> Residual:
    """Reduce ``evaluate(point)`` by max over ``spec.count`` good points.

    ``draw(rng)`` returns a point (a dict). A point whose evaluation hits a
    pole or overflows is redrawn; after ``max_resample_factor * count``
    draws without enough good points, :class:`EvaluationPole` is raised.
    """
    worst, where = -1.0, None
    used = resampled = 0
    values = []
    k = 0
    budget = spec.max_resample_factor * spec.count
    with np.errstate(all="ignore"):
        while used < spec.count:
            if k >= budget:
                raise EvaluationPole(where or "all samples", f"only {used} of {spec.count} usable samples")
            pt = draw(spec.rng(k))
            k += 1
            try:
                val = float(evaluate(pt))
            except _POLES:
                resampled += 1
                continue
            if not np.isfinite(val):
                raise NonFiniteResidual(f"non-finite residual at {pt}")
            used += 1
            values.append(val)
            if val > worst:
                worst, where = val, pt
    return Residual(worst, where, used, resampled, spec.seed, values)


# ---------------------------------------------------------------------------
# quantum checks


def _lam_draw(N, spec):
    return lambda rng: {"lambda": spec.lam(rng, N)}


def check_zero_weight(fam, spec: SampleSpec | None = None) -> Residual:
    """Max of ``|[R, h (x) 1 + 1 (x) h]|`` over the coordinate basis ``h``."""
    spec = spec or SampleSpec()
    N = fam.N
    hs = [np.kron(np.diag(np.eye(N)[i]), np.eye(N)) + np.kron(np.eye(N), np.diag(np.eye(N)[i])) for i in range(N)]
    spectral = isinstance(fam, (cons.SpectralRFamily, cons.SpectralClassicalRFamily))

    def draw(rng):
        pt = {"lambda": spec.lam(rng, N)}
        if spectral:
            pt["z"] = spec.z(rng)[0]
        return pt

    def ev(pt):
        D = fam.dense(pt["z"], pt["lambda"]) if spectral else fam.dense(pt["lambda"])
        D = guard(D, spec)
        return max(max_abs(D @ h - h @ D) for h in hs)

    return sweep(ev, draw, spec)


def qdyb_sides(dense: Callable, gamma, lam, N: int):
    """Both sides of the QDYB equation on ``V^{(x)3}``.

    ``dense`` maps ``(pair, lam)`` to the dense R acting on that pair of
    legs, so spectral families can pass their ``z_ij``.
    """
    f12 = lambda l: dense((0, 1), l)
    f13 = lambda l: dense((0, 2), l)
    f23 = lambda l: dense((1, 2), l)
    lhs = (
        embed_with_shift(f12, (0, 1), [2], -1, lam, gamma, 3, N)
        @ embed_with_shift(f13, (0, 2), [], -1, lam, gamma, 3, N)
        @ embed_with_shift(f23, (1, 2), [0], -1, lam, gamma, 3, N)
    )
    rhs = (
        embed_with_shift(f23, (1, 2), [], -1, lam, gamma, 3, N)
        @ embed_with_shift(f13, (0, 2), [1], -1, lam, gamma, 3, N)
        @ embed_with_shift(f12, (0, 1), [], -1, lam, gamma, 3, N)
    )
    return lhs, rhs


def check_qdyb(fam, spec: SampleSpec | None = None) -> Residual:
    spec = spec or SampleSpec()
    N, g = fam.N, fam.gamma
    if g == 0:
        raise InputError("the QDYB check needs a nonzero step")

    def ev(pt):
        lhs, rhs = qdyb_sides(lambda pair, l: guard(fam.dense(l), spec), g, pt["lambda"], N)
        return max_abs(lhs - rhs)

    return sweep(ev, _lam_draw(N, spec), spec)


def check_qdyb_spectral(fam, spec: SampleSpec | None = None) -> Residual:
    spec = spec or SampleSpec()
    N, g = fam.N, fam.gamma
    if g == 0:
        raise InputError("the QDYB check needs a nonzero step")

    def draw(rng):
        return {"lambda": spec.lam(rng, N), "z": spec.z(rng, 3)}

    def ev(pt):
        z = pt["z"]
        dense = lambda pair, l: guard(fam.dense(z[pair[0]] - z[pair[1]], l), spec)
        lhs, rhs = qdyb_sides(dense, g, pt["lambda"], N)
        return max_abs(lhs - rhs)

    return sweep(ev, draw, spec)


def check_unitarity(fam, spec: SampleSpec | None = None) -> Residual:
    """``max |R(z, lam) P R(-z, lam) P - Id|``."""
    spec = spec or SampleSpec()
    N = fam.N
    P = swap(N)
    eye = np.eye(N * N)

    def draw(rng):
        return {"lambda": spec.lam(rng, N), "z": spec.z(rng)[0]}

    def ev(pt):
        A = guard(fam.dense(pt["z"], pt["lambda"]), spec)
        B = guard(fam.dense(-pt["z"], pt["lambda"]), spec)
        return max_abs(A @ P @ B @ P - eye)

    return sweep(ev, draw, spec)


@dataclass
class HeckeReport:
    p: complex
    q: complex
    residual: Residual

    def __iter__(self):
        return iter((self.p, self.q, self.residual))


def _hecke_point(op: ZeroWeightOp):
    N = op.N
    diag = np.diag(op.alpha)
    traces, dets = [], []
    for a, b in itertools.combinations(range(N), 2):
        traces.append(op.beta[a, b] + op.beta[b, a])
        dets.append(op.beta[a, b] * op.beta[b, a] - op.alpha[a, b] * op.alpha[b, a])
    return diag, np.array(traces, dtype=complex), np.array(dets, dtype=complex)


def check_hecke(fam, p=None, q=None, spec: SampleSpec | None = None, *, p_tol: float = 1e-8) -> HeckeReport:
    """Measure Hecke parameters from ``R^vee = P R``.

    ``p`` is the eigenvalue on ``v_a (x) v_a``; then ``q = p - tr`` on every
    2-dimensional block ``V_ab``. The residual is the worst deviation of
    trace ``p - q`` and determinant ``-pq`` over blocks and samples. When
    ``p``/``q`` are given the residual is measured against them.

    ``fam`` may be an :class:`RFamily` (sampled) or a single
    :class:`ZeroWeightOp`.
    """
    spec = spec or SampleSpec()
    if isinstance(fam, ZeroWeightOp):
        ops = [fam]
        pts = [None]
        used, resampled = 1, 0
    else:
        ops, pts = [], []

        def ev(pt):
            op = fam.op(pt["lambda"])
            guard(op.alpha, spec)
            guard(op.beta, spec)
            ops.append(op)
            pts.append(pt)
            return 0.0

        res = sweep(ev, _lam_draw(fam.N, spec), spec)
        used, resampled = res.samples_used, res.resampled
    diags = np.concatenate([_hecke_point(o)[0] for o in ops])
    p_meas = complex(np.mean(diags)) if p is None else complex(p)
    if p is None and max_abs(diags - p_meas) > p_tol * max(1.0, abs(p_meas)):
        raise InconsistentP(f"diagonal eigenvalues spread {max_abs(diags - p_meas):.3e}")
    traces = np.concatenate([_hecke_point(o)[1] for o in ops])
    if q is None:
        q_meas = complex(np.mean(p_meas - traces)) if traces.size else complex("nan")
    else:
        q_meas = complex(q)
    worst, where = max_abs(diags - p_meas), None
    for o, pt in zip(ops, pts):
        _, tr, de = _hecke_point(o)
        dev = max(max_abs(tr - (p_meas - q_meas)) if tr.size else 0.0, max_abs(de + p_meas * q_meas) if de.size else 0.0)
        if dev > worst:
            worst, where = dev, pt
    return HeckeReport(p_meas, q_meas, Residual(worst, where, used, resampled, spec.seed))


def _coord_equations(f, a, b, c, q):
    """Residuals of the coordinate form of QDYB at one point.

    ``f(lam_shift_indices)`` returns the op at ``lam - sum omega_i``.
    Returns ``{name: value}`` for pairwise-distinct ``a, b, c``; equations
    that need only two indices use ``(a, c)``.
    """
    R0 = f(())
    Ra, Rb, Rc = f((a,)), f((b,)), f((c,))
    al, bt = R0.alpha, R0.beta
    out = {}
    out["trace"] = bt[a, c] + bt[c, a] - (1 - q)
    out["det"] = bt[a, c] * bt[c, a] - al[a, c] * al[c, a] + q
    out["aac_1"] = Ra.alpha[c, a] * bt[a, c] * Ra.alpha[a, c] + Ra.beta[a, c] ** 2 - Ra.beta[a, c]
    out["aac_2"] = Ra.beta[c, a] * bt[a, c] * Ra.alpha[a, c] + Ra.alpha[a, c] * Ra.beta[a, c] - bt[a, c] * Ra.alpha[a, c]
    out["alpha_product"] = al[a, c] * al[c, a] - (q + bt[a, c]) * (q + bt[c, a])
    if b is None:
        return out
    A, B = R0.alpha, R0.beta
    out["abc_1"] = Rc.alpha[a, b] * A[a, c] * Ra.alpha[b, c] - A[b, c] * Rb.alpha[a, c] * A[a, b]
    out["abc_2"] = Rb.alpha[a, c] * A[a, b] * Ra.beta[b, c] - B[b, c] * Rb.alpha[a, c] * A[a, b]
    out["abc_3"] = Rc.beta[a, b] * A[a, c] * Ra.alpha[b, c] - A[a, c] * Ra.alpha[b, c] * B[a, b]
    out["abc_4"] = (
        Ra.beta[c, b] * B[a, c] * Ra.alpha[b, c]
        + Ra.alpha[b, c] * B[a, b] * Ra.beta[b, c]
        - B[a, c] * Ra.alpha[b, c] * B[a, b]
    )
    out["abc_5"] = (
        Ra.alpha[c, b] * B[a, c] * Ra.alpha[b, c]
        + Ra.beta[b, c] * B[a, b] * Ra.beta[b, c]
        - A[b, a] * Rb.beta[a, c] * A[a, b]
        - B[a, b] * Ra.beta[b, c] * B[a, b]
    )
    out["abc_6"] = (
        Rb.beta[a, c] * A[a, b] * Ra.beta[b, c]
        - B[b, a] * Rb.beta[a, c] * A[a, b]
        - A[a, b] * Ra.beta[b, c] * B[a, b]
    )
    return out


COORDINATE_EQUATIONS = ("trace", "det", "aac_1", "aac_2", "abc_1", "abc_2", "abc_3", "abc_4", "abc_5", "abc_6", "alpha_product")


def check_coordinate_relations(fam, q=None, spec: SampleSpec | None = None) -> dict:
    """Per-equation residual table of the coordinate equations.

    Needs a family with step 1 and ``p = 1``. ``q`` is measured when not
    given. Keys are the equation labels of :data:`COORDINATE_EQUATIONS`.
    """
    spec = spec or SampleSpec()
    N = fam.N
    if q is None:
        q = check_hecke(fam, spec=spec).q
    g = fam.gamma
    triples = [(a, b, c) for a, b, c in itertools.permutations(range(N), 3)]
    pairs = [(a, c) for a, c in itertools.permutations(range(N), 2)]
    table = {k: [] for k in COORDINATE_EQUATIONS}

    def ev(pt):
        lam = pt["lambda"]
        cache = {}

        def f(idx):
            key = tuple(sorted(idx))
            if key not in cache:
                shift = lam.copy()
                for i in idx:
                    shift[i] -= g
                op = fam.op(shift)
                guard(op.alpha, spec)
                guard(op.beta, spec)
                cache[key] = op
            return cache[key]

        worst = {k: 0.0 for k in COORDINATE_EQUATIONS}
        for a, c in pairs:
            for k, v in _coord_equations(f, a, None, c, q).items():
                worst[k] = max(worst[k], abs(v))
        for a, b, c in triples:
            for k, v in _coord_equations(f, a, b, c, q).items():
                worst[k] = max(worst[k], abs(v))
        for k in worst:
            table[k].append((worst[k], pt))
        return max(worst.values())

    sweep(ev, _lam_draw(N, spec), spec)
    out = {}
    for k, vals in table.items():
        if not vals:
            out[k] = Residual(0.0, None, 0, 0, spec.seed)
            continue
        m, pt = max(vals, key=lambda t: t[0])
        out[k] = Residual(m, pt, len(vals), 0, spec.seed, [v for v, _ in vals])
    return out


# ---------------------------------------------------------------------------
# classical checks


def _fd_gradient(f, lam, h):
    """4th-order central differences of ``f`` in every coordinate."""
    lam = np.asarray(lam, dtype=complex)
    grads = []
    for i in range(len(lam)):
        e = np.zeros(len(lam))
        e[i] = h
        grads.append((-f(lam + 2 * e) + 8 * f(lam + e) - 8 * f(lam - e) + f(lam - 2 * e)) / (12 * h))
    return grads


def _cdyb_residual(r12, r13, r23, g12, g31, g23, N):
    """Residual of the classical dynamical Yang-Baxter equation on ``V^{(x)3}``.

    ``rij`` are dense 2-leg matrices, ``gij`` their gradients in ``lam``
    (``g31`` belongs to the ``r`` placed on legs (3, 1)).
    """
    E = [np.diag(np.eye(N)[i]) for i in range(N)]
    A12 = op_on_legs(r12, (0, 1), 3, N)
    A13 = op_on_legs(r13, (0, 2), 3, N)
    A23 = op_on_legs(r23, (1, 2), 3, N)
    D = np.zeros_like(A12)
    for i in range(N):
        D += op_on_legs(E[i], (0,), 3, N) @ op_on_legs(g23[i], (1, 2), 3, N)
        D += op_on_legs(E[i], (1,), 3, N) @ op_on_legs(g31[i], (2, 0), 3, N)
        D += op_on_legs(E[i], (2,), 3, N) @ op_on_legs(g12[i], (0, 1), 3, N)
    C = A12 @ A13 - A13 @ A12 + A12 @ A23 - A23 @ A12 + A13 @ A23 - A23 @ A13
    return D + C


def check_cdyb(fam, spec: SampleSpec | None = None, *, h: float = 1e-3, tol: float = 1e-6) -> Residual:
    """Classical dynamical Yang-Baxter residual with finite-difference gradients.

    Gradients use 4th-order central differences with step ``h``; they are
    compared with the same stencil at ``2h`` and :class:`DerivativeUnstable`
    is raised when the two disagree by more than ``10 * tol`` (relative to
    the gradient size, floored at 1). The returned residual uses the
    Richardson combination of both stencils.
    """
    spec = spec or SampleSpec()
    N = fam.N
    spectral = isinstance(fam, cons.SpectralClassicalRFamily)

    def draw(rng):
        pt = {"lambda": spec.lam(rng, N)}
        if spectral:
            pt["z"] = spec.z(rng, 3)
        return pt

    def ev(pt):
        lam = pt["lambda"]
        if spectral:
            z = pt["z"]
            fz = lambda w: (lambda l: guard(fam.dense(w, l), spec))
            f12, f13, f23, f31 = fz(z[0] - z[1]), fz(z[0] - z[2]), fz(z[1] - z[2]), fz(z[2] - z[0])
        else:
            f12 = f13 = f23 = f31 = lambda l: guard(fam.dense(l), spec)
        grads = {}
        for name, f in (("12", f12), ("31", f31), ("23", f23)):
            g1 = _fd_gradient(f, lam, h)
            g2 = _fd_gradient(f, lam, 2 * h)
            dev = max(max_abs(a - b) / max(1.0, max_abs(a)) for a, b in zip(g1, g2))
            if dev > 10 * tol:
                raise DerivativeUnstable(f"finite-difference gradients disagree by {dev:.3e} at {lam}")
            # one Richardson step on the two stencils
            grads[name] = [(16 * a - b) / 15 for a, b in zip(g1, g2)]
        M = _cdyb_residual(f12(lam), f13(lam), f23(lam), grads["12"], grads["31"], grads["23"], N)
        return max_abs(M)

    return sweep(ev, draw, spec)


@dataclass
class CouplingReport:
    epsilon: complex
    delta: complex
    residual: Residual
    unitarity: Residual | None = None

    def __iter__(self):
        return iter((self.epsilon, self.delta, self.residual))


def _fit_pid(mats, N):
    """Least-squares fit of ``eps P + delta Id`` to a stack of matrices."""
    if not mats:
        raise FitFailure("nothing to fit")
    P = swap(N).ravel()
    I = np.eye(N * N).ravel()
    A = np.tile(np.stack([P, I], axis=1), (len(mats), 1))
    y = np.concatenate([m.ravel() for m in mats])
    if not np.all(np.isfinite(y)):
        raise FitFailure("non-finite data")
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    dev = max_abs(A @ coef - y)
    return complex(coef[0]), complex(coef[1]), dev


def check_classical_unitarity_and_residue(fam, spec: SampleSpec | None = None, *, z_steps=(1e-2, 5e-3)) -> CouplingReport:
    """Coupling constants of a classical r-matrix.

    Constant case: fit ``r + r^21 = eps P + delta Id``. Spectral case: the
    unitarity residual ``|r(z) + r^21(-z)|`` is reported separately and
    ``(eps, delta)`` are fitted to ``Res_{z=0} r``, estimated from the even
    part of ``z r(z)`` extrapolated over ``z_steps``.
    """
    spec = spec or SampleSpec()
    N = fam.N
    P = swap(N)
    mats = []
    spectral = isinstance(fam, cons.SpectralClassicalRFamily)
    if not spectral:

        def ev(pt):
            D = guard(fam.dense(pt["lambda"]), spec)
            mats.append(D + P @ D @ P)
            return 0.0

        res = sweep(ev, _lam_draw(N, spec), spec)
        eps, dl, dev = _fit_pid(mats, N)
        return CouplingReport(eps, dl, Residual(dev, None, res.samples_used, res.resampled, spec.seed))

    def draw(rng):
        return {"lambda": spec.lam(rng, N), "z": spec.z(rng)[0]}

    def ev_u(pt):
        A = guard(fam.dense(pt["z"], pt["lambda"]), spec)
        B = guard(fam.dense(-pt["z"], pt["lambda"]), spec)
        return max_abs(A + P @ B @ P)

    unit = sweep(ev_u, draw, spec)
    h1, h2 = z_steps
    direction = np.exp(0.3j)  # generic ray avoids real-axis poles of r

    def ev_r(pt):
        lam = pt["lambda"]
        g = lambda w: 0.5 * (w * fam.dense(w, lam) + (-w) * fam.dense(-w, lam))
        est1 = g(h1 * direction)
        est2 = g(h2 * direction)
        ratio = (h1 / h2) ** 2
        res = (ratio * est2 - est1) / (ratio - 1)
        guard(res, spec)
        mats.append(res)
        return max_abs(est1 - est2)

    res = sweep(ev_r, _lam_draw(N, spec), spec)
    eps, dl, dev = _fit_pid(mats, N)
    return CouplingReport(eps, dl, Residual(dev, None, res.samples_used, res.resampled, spec.seed), unit)


# ---------------------------------------------------------------------------
# limits


def quasiclassical_limit(fam_of_gamma: Callable, point: dict, r_expected: Callable | None = None, *, steps=(1e-2, 5e-3), unstable: float = 1e-2):
    """Estimate ``r = lim (Id - R_gamma) / gamma`` at one point.

    ``fam_of_gamma(gamma)`` returns a family; ``point`` carries ``lambda``
    and, for spectral families, ``z``. The central quotient
    ``(R_{-g} - R_g) / (2g)`` is Richardson-extrapolated over ``steps``.
    Returns ``(r_estimate, deviation)`` where ``deviation`` compares with
    ``r_expected(point)`` if given (else 0).
    """
    lam = np.asarray(point["lambda"], dtype=complex)
    z = point.get("z")

    def dense(g):
        fam = fam_of_gamma(g)
        return fam.dense(z, lam) if z is not None else fam.dense(lam)

    h1, h2 = steps
    c1 = (dense(-h1) - dense(h1)) / (2 * h1)
    c2 = (dense(-h2) - dense(h2)) / (2 * h2)
    ratio = (h1 / h2) ** 2
    est = (ratio * c2 - c1) / (ratio - 1)
    spread = max_abs(c1 - c2)
    if not np.all(np.isfinite(est)) or spread > unstable * max(1.0, max_abs(est)):
        raise ExtrapolationUnstable(f"quotients at {steps} differ by {spread:.3e}")
    dev = 0.0
    if r_expected is not None:
        dev = max_abs(est - np.asarray(r_expected(point)))
    return est, dev


def rho_vector(N: int) -> np.ndarray:
    """Strictly decreasing ``rho`` with unit gaps, centred at 0."""
    return (N - 1) / 2 - np.arange(N, dtype=float)


def degeneration_check(kind: str, params: dict | None = None, spec: SampleSpec | None = None, *, raise_on_fail: bool = True) -> list:
    """Residual sequences of the degeneration limits.

    ``elliptic_to_trig``: ``R^ell_{gamma, iT}(z, lam)`` against the full
    trigonometric family at ``(pi gamma, pi z, pi lam)`` for ``T`` in
    ``params["T"]`` (default 2, 4, 8); the sequence must decrease and end
    below ``params["tol"]`` (1e-6).

    ``trig_to_rational``: ``R^trig_{eps gamma}(eps z, eps lam)`` against
    ``R^rat_gamma(z, lam)`` for ``eps`` in ``params["eps"]`` (default 1e-2,
    1e-3, 1e-4), final tolerance 1e-4.

    ``frt_extrapolation``: ``R(t sigma(rho) / eps)`` for the full trig Hecke
    family against ``R_sigma`` for ``t`` in ``params["t"]`` (default 10, 25,
    50), final tolerance 1e-6.
    """
    params = dict(params or {})
    spec = spec or SampleSpec(count=5)
    N = int(params.get("N", 2))
    seq = []
    if kind == "elliptic_to_trig":
        Ts = params.get("T", (2, 4, 8))
        tol = params.get("tol", 1e-6)
        g = complex(params.get("gamma", 0.3))
        trig = cons.spectral_trig_R(cons.IntervalDecomposition.full(N), np.pi * g)
        draw = lambda rng: {"lambda": spec.disc(rng, N, 0.5), "z": spec.disc(rng, 1, 0.5, 0.5)[0]}
        for T in Ts:
            ell = cons.spectral_elliptic_R(N, g, thetafn.EllipticParams(1j * T))
            ev = lambda pt: max_abs(guard(ell.dense(pt["z"], pt["lambda"]), spec) - trig.dense(np.pi * pt["z"], np.pi * pt["lambda"]))
            seq.append(sweep(ev, draw, spec))
        ok = all(b.max_abs < a.max_abs for a, b in zip(seq, seq[1:])) and seq[-1].max_abs < tol
    elif kind == "trig_to_rational":
        epss = params.get("eps", (1e-2, 1e-3, 1e-4))
        tol = params.get("tol", 1e-4)
        g = complex(params.get("gamma", 0.5))
        d = params.get("decomposition") or cons.IntervalDecomposition.full(N)
        rat = cons.spectral_rational_R(d, g)
        # z stays in a disc where |gamma z / (z - gamma)| < 1, the size of the O(eps) term
        zc = complex(params.get("z_center", -1.5))
        draw = lambda rng: {"lambda": spec.lam(rng, N), "z": spec.disc(rng, 1, 1.0, zc)[0]}
        for e in epss:
            trig = cons.spectral_trig_R(d, e * g)
            ev = lambda pt: max_abs(guard(trig.dense(e * pt["z"], e * pt["lambda"]), spec) - rat.dense(pt["z"], pt["lambda"]))
            seq.append(sweep(ev, draw, spec))
        ok = seq[-1].max_abs < tol
    elif kind == "frt_extrapolation":
        ts = params.get("t", (10, 25, 50))
        tol = params.get("tol", 1e-6)
        eps = complex(params.get("epsilon", 0.7))
        sigma = np.asarray(params.get("sigma", np.arange(N)))
        N = len(sigma)
        fam = cons.trig_hecke_R(cons.IntervalDecomposition.full(N), eps)
        target = cons.frt_constant_R(sigma, np.exp(eps)).dense(np.zeros(N))
        rho = rho_vector(N)
        srho = rho[sigma]
        for t in ts:
            D = fam.dense(t * srho / eps)
            seq.append(Residual(max_abs(D - target), {"t": t}, 1, 0, spec.seed))
        ok = seq[-1].max_abs < tol
    else:
        raise InputError(f"unknown degeneration kind {kind!r}")
    if raise_on_fail and not ok:
        raise LimitNotReached([r.max_abs for r in seq])
    return seq
