"""Acceptance suites: every property check of the library, grouped by topic.

Each criterion is a function of a seed returning a :class:`CriterionResult`,
a list of named :class:`Check` records. Fixtures are drawn from
``default_rng([seed, criterion])`` and sample points from
``SampleSpec(seed=seed)``, so results are deterministic per seed.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebroid as alg
from . import classify as clf
from . import constructors as cons
from . import gauge
from . import thetafn
from . import verify
from .errors import DynRMatError, InputError, NumericalError
from .tensorspace import max_abs, to_dense

__all__ = [
    "Check",
    "CriterionResult",
    "CRITERIA",
    "SUITES",
    "run_criterion",
    "run_suite",
    "random_decomposition",
    "random_mu",
    "scrambled_fixture",
]


@dataclass
class Check:
    name: str
    passed: bool
    residual: float | None
    tolerance: float | None
    seed: int
    detail: dict = field(default_factory=dict)
    error: str | None = None
    numerical_error: bool = False
    criterion: int | None = None

    def to_json(self) -> dict:
        out = {"criterion": self.criterion} if self.criterion is not None else {}
        out |= {
            "name": self.name,
            "pass": bool(self.passed),
            "residual": _num(self.residual),
            "tolerance": self.tolerance,
            "seed": self.seed,
        }
        if self.detail:
            out["detail"] = verify._jsonable(self.detail)
        if self.error:
            out["error"] = self.error
        return out


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else str(x)


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def worst(self) -> Check | None:
        failed = [c for c in self.checks if not c.passed]
        return failed[0] if failed else None

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        n_fail = sum(not c.passed for c in self.checks)
        line = f"[{status}] criterion {self.number:2d}: {self.title} ({len(self.checks) - n_fail}/{len(self.checks)} checks)"
        if self.worst is not None:
            w = self.worst
            line += f"; first failure {w.name} residual={_num(w.residual)} tol={w.tolerance}"
        return line


def _check(name, residual, tol, seed, **detail) -> Check:
    r = float(residual)
    return Check(name, bool(np.isfinite(r) and r < tol), r, tol, seed, detail)


def _guarded(name, seed, tol, f: Callable) -> list:
    """Run ``f`` (returning a list of checks); turn library errors into failed checks."""
    try:
        return f()
    except DynRMatError as e:
        return [Check(name, False, None, tol, seed, error=f"{type(e).__name__}: {e}", numerical_error=isinstance(e, NumericalError))]


def _rng(seed, k):
    return np.random.default_rng([int(seed), int(k)])


def _cplx(rng, scale=1.0, size=None):
    return scale * (rng.normal(size=size) + 1j * rng.normal(size=size)) / np.sqrt(2)


# ---------------------------------------------------------------------------
# fixtures


def random_decomposition(rng, N: int, *, nontrivial: bool = True) -> cons.IntervalDecomposition:
    """A random subset of ``0..N-1`` split into intervals.

    With ``nontrivial`` set (and ``N >= 2``), at least one interval has two
    or more elements.
    """
    while True:
        X = [i for i in range(N) if rng.random() < 0.65]
        d = cons.decompose(X, N)
        if not nontrivial or N < 2 or any(b > a for a, b in d.intervals):
            return d


def random_mu(rng, N: int, case: str) -> cons.QuasiconstantTable:
    """Constant quasiconstants from a random potential (so the cocycle law holds)."""
    m = _cplx(rng, 0.5, N)
    if case == "additive":
        return cons.QuasiconstantTable.from_potential(m, "additive")
    return cons.QuasiconstantTable.from_potential(np.exp(m), "multiplicative")


def random_epsilon(rng) -> complex:
    r = rng.uniform(0.2, 1.0)
    t = rng.uniform(-1.2, 1.2)
    return complex(r * np.exp(1j * t))


def random_two_form(rng, N, gamma, scale=0.3) -> gauge.MultiplicativeForm:
    """Quantized closed 2-form from a random quadratic 1-form potential."""
    A = _cplx(rng, scale, (N, N))
    B = _cplx(rng, scale / 3, (N, N, N))
    return gauge.quantize_closed_form(gauge.polynomial_one_form(A, B), gamma)


def random_constant_chain(rng, N, gamma, length=4):
    """Random gauge moves for a constant family; returns ``(moves, total_scale)``."""
    moves, scale = [], complex(1.0)
    kinds = ["two_form", "perm", "scale", "affine"]
    for i in range(length):
        k = kinds[i] if i < len(kinds) else kinds[rng.integers(len(kinds))]
        if k == "two_form":
            moves.append(gauge.GaugeMove(k, {"form": None}))
        elif k == "perm":
            moves.append(gauge.GaugeMove(k, {"sigma": rng.permutation(N)}))
        elif k == "scale":
            c = complex(rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
            scale *= c
            moves.append(gauge.GaugeMove(k, {"c": c}))
        else:
            c = complex(rng.uniform(0.6, 1.6) * np.exp(1j * rng.uniform(-0.5, 0.5)))
            moves.append(gauge.GaugeMove(k, {"c": c, "mu": _cplx(rng, 0.5, N)}))
    order = rng.permutation(len(moves))
    return _refresh_forms(rng, [moves[i] for i in order], N, gamma), scale


def _refresh_forms(rng, moves, N, gamma, scale=0.3):
    """Fill two-form payloads, quantized at the step in force where they are applied."""
    g = complex(gamma)
    out = []
    for m in moves:
        if m.kind == "two_form":
            m = gauge.GaugeMove("two_form", {"form": random_two_form(rng, N, g, scale)})
        elif m.kind == "affine":
            g = g / complex(m.payload["c"])
        out.append(m)
    return out


def random_spectral_chain(rng, N, gamma, length=5):
    moves = []
    kinds = ["psi", "scale_fn", "affine", "two_form", "perm"]
    for i in range(length):
        k = kinds[i] if i < len(kinds) else kinds[rng.integers(len(kinds))]
        if k == "psi":
            M = _cplx(rng, 0.3, (N, N))
            moves.append(gauge.GaugeMove(k, {"psi": gauge.QuadraticPotential(M + M.T, _cplx(rng, 0.3, N))}))
        elif k == "scale_fn":
            moves.append(gauge.GaugeMove(k, {"exp": complex(_cplx(rng, 0.5))}))
        elif k == "affine":
            c = complex(rng.uniform(0.7, 1.4))
            b = complex(rng.uniform(0.7, 1.4))
            moves.append(gauge.GaugeMove(k, {"c": c, "b": b, "mu": _cplx(rng, 0.3, N)}))
        elif k == "two_form":
            moves.append(gauge.GaugeMove(k, {"form": None}))
        else:
            moves.append(gauge.GaugeMove(k, {"sigma": rng.permutation(N)}))
    order = rng.permutation(len(moves))
    return _refresh_forms(rng, [moves[i] for i in order], N, gamma, 0.2)


@dataclass
class ScrambledFixture:
    """A canonical family hidden behind a gauge chain, with its expected classification.

    The scrambled family is ``Conj_tau C(k lam[tau] + b)`` up to two-forms and
    scalars, where ``C`` is the step-1 canonical family. ``expected_mu(a, c)``
    is the quasiconstant recovered for the pair ``(tau[a], tau[c])``.
    """

    family: cons.RFamily
    case: str
    decomposition: cons.IntervalDecomposition
    mu: cons.QuasiconstantTable
    epsilon: complex | None
    tau: np.ndarray
    offset: np.ndarray
    chain: list

    @property
    def q(self) -> complex:
        return complex(1.0) if self.epsilon is None else cmath.exp(self.epsilon)

    def expected_mu(self, a, c) -> complex:
        db = self.offset[a] - self.offset[c]
        if self.case == "p_eq_q":
            return self.mu.values[a, c] - db
        return self.mu.values[a, c] * np.exp(self.epsilon * db)


def scrambled_fixture(rng, N: int, case: str, *, length=5) -> ScrambledFixture:
    """Random canonical family scrambled by a random constant gauge chain."""
    d = random_decomposition(rng, N, nontrivial=False)
    s0 = complex(rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(-0.4, 0.4)))
    if case == "p_eq_q":
        mu = random_mu(rng, N, "additive")
        eps = None
        fam = cons.rational_hecke_R(d, mu, step=s0)
    else:
        mu = random_mu(rng, N, "multiplicative")
        eps = random_epsilon(rng)
        fam = cons.trig_hecke_R(d, eps, mu, step=s0)
    moves, _ = random_constant_chain(rng, N, s0, length)
    tau = np.arange(N)
    k = 1 / s0
    b = np.zeros(N, dtype=complex)
    for m in moves:
        fam = gauge.gauge_constant(fam, m)
        if m.kind == "perm":
            tau = np.asarray(m.payload["sigma"])[tau]
        elif m.kind == "affine":
            c, off = complex(m.payload["c"]), np.asarray(m.payload["mu"], dtype=complex)
            b = b + k * off[tau]
            k = k * c
    return ScrambledFixture(fam, case, d, mu, eps, tau, b, moves)


def _specs(seed, **kw):
    return verify.SampleSpec(seed=seed, **kw)


# ---------------------------------------------------------------------------
# 1-3: canonical families


def criterion_1(seed: int) -> CriterionResult:
    rng = _rng(seed, 1)
    spec = _specs(seed, count=20)
    tol = 1e-8
    checks = []
    for N in (2, 3, 4):
        fixtures = [("rational_hecke", None), ("trig_hecke", complex(np.log(2))), ("trig_hecke", 0.3 + 0.1j)]
        for name, eps in fixtures:
            d = random_decomposition(rng, N)
            if eps is None:
                fam = cons.rational_hecke_R(d, random_mu(rng, N, "additive"))
                label = f"qdyb/{name}/N={N}/X={list(d.intervals)}"
            else:
                fam = cons.trig_hecke_R(d, eps, random_mu(rng, N, "multiplicative"))
                label = f"qdyb/{name}/N={N}/X={list(d.intervals)}/q=exp({eps:.4g})"

            def run(fam=fam, label=label):
                r = verify.check_qdyb(fam, spec)
                zw = verify.check_zero_weight(fam, spec)
                return [
                    _check(label, r.max_abs, tol, seed, samples=r.samples_used, resampled=r.resampled),
                    Check(label.replace("qdyb/", "zero_weight/"), zw.max_abs == 0.0, zw.max_abs, 0.0, seed),
                ]

            checks += _guarded(label, seed, tol, run)
    return CriterionResult(1, "QDYB of rational and trigonometric Hecke families", checks)


def _spectral_fixtures(rng):
    out = []
    for N in (2, 3, 4):
        d = random_decomposition(rng, N)
        g = complex(rng.uniform(0.2, 0.8))
        out.append((f"spectral_rational/N={N}/X={list(d.intervals)}", cons.spectral_rational_R(d, g), {}))
        d = random_decomposition(rng, N)
        out.append((f"spectral_trig/N={N}/X={list(d.intervals)}", cons.spectral_trig_R(d, g), {}))
    for N in (2, 3):
        for T in (1.0, 2.0):
            p = thetafn.EllipticParams(complex(rng.uniform(-0.5, 0.5), T))
            out.append((f"spectral_elliptic/N={N}/tau={p.tau:.3g}", cons.spectral_elliptic_R(N, 0.3, p), {"radius": 0.5, "z_radius": 0.5}))
    return out


def criterion_2(seed: int) -> CriterionResult:
    rng = _rng(seed, 2)
    tol = 1e-8
    checks = []
    for label, fam, kw in _spectral_fixtures(rng):
        spec = _specs(seed, count=20, **kw)

        def run(fam=fam, label=label, spec=spec):
            r = verify.check_qdyb_spectral(fam, spec)
            u = verify.check_unitarity(fam, spec)
            return [_check(f"qdyb/{label}", r.max_abs, tol, seed, resampled=r.resampled), _check(f"unitarity/{label}", u.max_abs, tol, seed)]

        checks += _guarded(label, seed, tol, run)
    return CriterionResult(2, "spectral QDYB and unitarity", checks)


def criterion_3(seed: int) -> CriterionResult:
    rng = _rng(seed, 3)
    spec = _specs(seed, count=10)
    tol = 1e-10
    checks = []
    for N in (2, 3, 4):
        cases = [("rational_hecke", None), ("trig_hecke", random_epsilon(rng)), ("trig_hecke", 0.3 + 0.1j)]
        for name, eps in cases:
            d = random_decomposition(rng, N, nontrivial=False)
            if eps is None:
                fam, q_true = cons.rational_hecke_R(d, random_mu(rng, N, "additive")), 1.0
            else:
                fam, q_true = cons.trig_hecke_R(d, eps, random_mu(rng, N, "multiplicative")), cmath.exp(eps)
            label = f"{name}/N={N}/X={list(d.intervals)}"

            def run(fam=fam, q_true=q_true, label=label):
                rep = verify.check_hecke(fam, spec=spec)
                out = [
                    _check(f"hecke_p/{label}", abs(rep.p - 1), tol, seed, p=rep.p),
                    _check(f"hecke_q/{label}", abs(rep.q - q_true), tol, seed, q=rep.q),
                    _check(f"hecke_relation/{label}", rep.residual.max_abs, tol, seed),
                ]
                tab = verify.check_coordinate_relations(fam, q_true, spec)
                for key in ("trace", "det", "alpha_product"):
                    out.append(_check(f"{key}/{label}", tab[key].max_abs, tol, seed))
                return out

            checks += _guarded(label, seed, tol, run)
    # a scaled copy must report (c p, c q)
    c = 1.7 - 0.4j
    fam = gauge.gauge_constant(cons.trig_hecke_R(cons.IntervalDecomposition.full(3), 0.5), gauge.GaugeMove("scale", {"c": c}))
    rep = verify.check_hecke(fam, spec=spec)
    checks.append(_check("hecke_scaled/trig_hecke/N=3", max(abs(rep.p - c), abs(rep.q - c * cmath.exp(0.5))), tol, seed))
    return CriterionResult(3, "Hecke spectra and coordinate identities", checks)


# ---------------------------------------------------------------------------
# 4-5: gauge


def criterion_4(seed: int) -> CriterionResult:
    rng = _rng(seed, 4)
    tol = 1e-7
    spec = _specs(seed, count=8, radius=1.5)
    zspec = _specs(seed, count=8, radius=1.0, z_radius=0.5)
    checks = []
    consts = [
        ("rational_hecke", lambda N: cons.rational_hecke_R(random_decomposition(rng, N), random_mu(rng, N, "additive"))),
        ("trig_hecke", lambda N: cons.trig_hecke_R(random_decomposition(rng, N), random_epsilon(rng), random_mu(rng, N, "multiplicative"))),
    ]
    for name, make in consts:
        for i in range(10):
            N = 3 if i % 2 == 0 else 4
            fam0 = make(N)
            moves, c = random_constant_chain(rng, N, fam0.gamma, length=4 + i % 3)
            label = f"{name}/N={N}/chain{i}"

            def run(fam0=fam0, moves=moves, c=c, label=label):
                p0, q0, _ = verify.check_hecke(fam0, spec=spec)
                fam = gauge.apply_chain(fam0, moves)
                r = verify.check_qdyb(fam, spec)
                p1, q1, _ = verify.check_hecke(fam, spec=spec)
                dev = max(abs(p1 - c * p0), abs(q1 - c * q0))
                back = gauge.apply_chain(fam, gauge.inverse_chain(moves))
                lam = spec.lam(spec.rng(999), N)
                inv = max_abs(back.dense(lam) - fam0.dense(lam))
                kinds = [m.kind for m in moves]
                return [
                    _check(f"qdyb/{label}", r.max_abs, tol, seed, moves=kinds),
                    _check(f"hecke_params/{label}", dev, tol, seed, scale=c),
                    _check(f"inverse_chain/{label}", inv, tol, seed),
                ]

            checks += _guarded(label, seed, tol, run)
    spectral = [
        ("spectral_rational", lambda N: cons.spectral_rational_R(random_decomposition(rng, N), 0.6)),
        ("spectral_trig", lambda N: cons.spectral_trig_R(random_decomposition(rng, N), 0.4)),
    ]
    for name, make in spectral:
        for i in range(10):
            N = 2 + i % 2
            fam0 = make(N)
            moves = random_spectral_chain(rng, N, fam0.gamma, length=5 + i % 2)
            label = f"{name}/N={N}/chain{i}"

            def run(fam0=fam0, moves=moves, label=label):
                fam = gauge.apply_chain(fam0, moves)
                r = verify.check_qdyb_spectral(fam, zspec)
                u = verify.check_unitarity(fam, zspec)
                kinds = [m.kind for m in moves]
                return [_check(f"qdyb/{label}", r.max_abs, tol, seed, moves=kinds), _check(f"unitarity/{label}", u.max_abs, tol, seed)]

            checks += _guarded(label, seed, tol, run)
    return CriterionResult(4, "gauge invariance of QDYB, unitarity and Hecke parameters", checks)


def _random_one_form(rng, N, scale=0.4) -> gauge.MultiplicativeForm:
    A = _cplx(rng, scale, (N, N))
    B = _cplx(rng, scale / 2, (N, N, N))
    c = _cplx(rng, 1.0, N)

    def comp(idx, lam):
        (a,) = idx
        return c[a] * np.exp(A[a] @ lam + lam @ B[a] @ lam)

    return gauge.MultiplicativeForm(1, N, comp, True, {"type": "random_exp_quadratic"})


def criterion_5(seed: int) -> CriterionResult:
    rng = _rng(seed, 5)
    tol = 1e-12
    spec = _specs(seed, count=8, radius=1.0)
    checks = []
    for N in (3, 4):
        for i in range(3):
            theta = _random_one_form(rng, N)
            g = complex(_cplx(rng, 0.6))

            def run(theta=theta, g=g, N=N, i=i):
                r = gauge.check_gamma_closed(gauge.d_gamma(theta, g), g, spec)
                return [_check(f"d_gamma_squared/N={N}/form{i}", r.max_abs, tol, seed, gamma=g)]

            checks += _guarded(f"d_gamma_squared/N={N}", seed, tol, run)
            A = _cplx(rng, 0.3, (N, N))
            B = _cplx(rng, 0.2, (N, N, N))
            E = gauge.polynomial_one_form(A, B)

            def run_q(E=E, g=g, N=N, i=i, A=A, B=B):
                phi = gauge.quantize_closed_form(E, g)
                closed = gauge.check_gamma_closed(phi, g, spec)
                out = [_check(f"quantized_closed/N={N}/form{i}", closed.max_abs, tol, seed)]
                # log(phi_ab) / h against -(dE)_ab, Richardson over h, h/2
                h = 1e-3
                worst = 0.0
                prng = spec.rng(55)
                for _ in range(4):
                    lam = spec.lam(prng, N)
                    grad = lambda a, b: A[a, b] + (B[a, b, :] + B[a, :, b]) @ lam
                    for a, b in itertools.combinations(range(N), 2):
                        dE = grad(b, a) - grad(a, b)
                        ests = [np.log(gauge.quantize_closed_form(E, s)((a, b), lam)) / s for s in (h, h / 2)]
                        rich = 2 * ests[1] - ests[0]
                        worst = max(worst, abs(rich + dE))
                out.append(_check(f"quantized_first_order/N={N}/form{i}", worst, 1e-4, seed, h=h))
                return out

            checks += _guarded(f"quantized/N={N}", seed, tol, run_q)
    return CriterionResult(5, "d_gamma squares to one; quantized closed forms", checks)


# ---------------------------------------------------------------------------
# 6: classification


def classification_checks(fx: ScrambledFixture, label: str, seed: int, spec=None) -> list:
    """Compare a classification with a fixture's known answer."""
    cf = clf.classify(fx.family, spec)
    out = []
    # blocks of the canonical family, pushed through tau then sigma
    pos = lambda a: int(cf.sigma[fx.tau[a]])
    want = {frozenset(pos(a) for a in range(s, e + 1)) for s, e in clf.strip_singletons(fx.decomposition).intervals}
    got = {frozenset(range(s, e + 1)) for s, e in clf.strip_singletons(cf.decomposition).intervals}
    ok = want == got and cf.case == fx.case
    out.append(Check(f"decomposition/{label}", ok, 0.0 if ok else 1.0, 0.0, seed, {"expected": sorted(map(sorted, want)), "got": sorted(map(sorted, got))}))
    worst = 0.0
    for s, e in fx.decomposition.intervals:
        for a, c in itertools.permutations(range(s, e + 1), 2):
            x = cf.mu.values[pos(a), pos(c)]
            y = fx.expected_mu(a, c)
            worst = max(worst, abs(x - y) / max(1.0, abs(y)))
    out.append(_check(f"mu/{label}", worst, 1e-6, seed))
    out.append(_check(f"q/{label}", abs(cf.q - fx.q), 1e-8, seed, q=cf.q))
    return out


def criterion_6(seed: int, count: int = 50) -> CriterionResult:
    rng = _rng(seed, 6)
    checks = []
    for i in range(count):
        case = "p_eq_q" if i % 2 == 0 else "p_ne_q"
        N = 2 + i % 4
        fx = scrambled_fixture(rng, N, case)
        label = f"{case}/N={N}/fixture{i}"
        checks += _guarded(f"classify/{label}", seed, 1e-6, lambda fx=fx, label=label: classification_checks(fx, label, seed))
    return CriterionResult(6, "classification round trip on scrambled fixtures", checks)


# ---------------------------------------------------------------------------
# 7-8: rigidity and representations


def criterion_7(seed: int) -> CriterionResult:
    rng = _rng(seed, 7)
    checks = []
    spec = _specs(seed, count=6, radius=1.0)
    for N in (2, 3):
        for eps in (complex(np.log(2)), 0.3 + 0.1j):
            fam = cons.trig_hecke_R(cons.IntervalDecomposition.full(N), eps)
            q = cmath.exp(eps)
            label = f"trig_full/N={N}/q=exp({eps:.4g})"

            def run(fam=fam, q=q, N=N, label=label):
                dev_or = dev_cf = dev_lit = dev_corr = 0.0
                prng = spec.rng(77)
                used = 0
                while used < spec.count:
                    lam = spec.lam(prng, N)
                    try:
                        rd = alg.compute_rigidity(fam, lam, oracle_tol=None)
                        q_or, qp_or = alg.rigidity_oracle(fam, lam)
                        cf = alg.closed_form_Q_trig(lam, q, N)
                    except (NumericalError, ZeroDivisionError):
                        continue
                    Qd, Qpd = np.diag(rd.Q), np.diag(rd.Qp)
                    if qp_or is None or not np.all(np.isfinite(Qpd)):
                        continue
                    used += 1
                    dev_or = max(dev_or, max_abs(Qd - q_or), max_abs(Qpd - qp_or))
                    dev_cf = max(dev_cf, max_abs(Qd - np.diag(cf.Q)), max_abs(Qpd - np.diag(cf.Qp)))
                    dev_lit = max(dev_lit, max_abs(Qpd - q / Qd))
                    dev_corr = max(dev_corr, max_abs(Qpd - q ** (N - 1) / Qd))
                return [
                    _check(f"contraction_vs_oracle/{label}", dev_or, 1e-9, seed),
                    _check(f"closed_form/{label}", dev_cf, 1e-9, seed),
                    _check(f"Qp_equals_q_over_Q/{label}", dev_lit, 1e-9, seed),
                    _check(f"Qp_equals_q^(N-1)_over_Q/{label}", dev_corr, 1e-9, seed),
                ]

            checks += _guarded(label, seed, 1e-9, run)

            def run_cross(fam=fam, label=label):
                r = alg.check_crossing(fam, spec)
                return [_check(f"crossing/{label}", r.max_abs, 1e-8, seed)]

            checks += _guarded(f"crossing/{label}", seed, 1e-8, run_cross)
    worst = 0.0
    for n in range(1, 7):
        for _ in range(3):
            x = _cplx(rng, 2.0, n)
            y = _cplx(rng, 2.0, n)
            worst = max(worst, alg.cauchy_det_check(x, y)[2])
    checks.append(_check("cauchy_determinant/n<=6", worst, 1e-10, seed))
    return CriterionResult(7, "rigidity, crossing symmetry and the Cauchy determinant", checks)


def _weight_block_matrix(rng, weights):
    """Random zero-weight matrix on a weighted space, with smooth dependence on lambda."""
    n = len(weights)
    same = np.all(np.abs(weights[:, None, :] - weights[None, :, :]) < 1e-12, axis=2)
    C0 = _cplx(rng, 0.3, (n, n)) + 2 * np.eye(n)
    C1 = _cplx(rng, 0.1, (n, n))
    v = _cplx(rng, 0.5, weights.shape[1])

    def A(lam):
        return np.where(same, C0 + C1 * np.sin(v @ np.asarray(lam)), 0)

    return A


def criterion_8(seed: int) -> CriterionResult:
    rng = _rng(seed, 8)
    spec = _specs(seed, count=6, radius=1.0)
    checks = []
    fams = [
        ("trig_full/N=2", cons.trig_hecke_R(cons.IntervalDecomposition.full(2), 0.4 + 0.1j)),
        ("trig/N=3", cons.trig_hecke_R(random_decomposition(rng, 3), random_epsilon(rng), random_mu(rng, 3, "multiplicative"))),
        ("rational/N=3", cons.rational_hecke_R(random_decomposition(rng, 3), random_mu(rng, 3, "additive"))),
    ]
    for label, fam in fams:
        fam = fam.with_meta(label=label)

        def run(fam=fam, label=label):
            out = []
            b = alg.basic_rep(fam)
            rll = alg.check_rll(b, fam, spec)
            qd = verify.check_qdyb(fam, spec)
            same = max(abs(x - y) for x, y in zip(rll.values, qd.values))
            out.append(_check(f"basic_rll_equals_qdyb/{label}", same, 1e-12, seed, rll=rll.max_abs))
            W = alg.tensor_rep(b, b)
            out.append(_check(f"tensor_rll/{label}", alg.check_rll(W, fam, spec).max_abs, 1e-8, seed))
            worst = 0.0
            for rep in (b, W):
                for s1, s2 in (("right", "left"), ("left", "right")):
                    rt = alg.dual_rep(alg.dual_rep(rep, s1), s2)
                    if max_abs(rt.weights - rep.weights) != 0:
                        worst = np.inf
                    prng = spec.rng(88)
                    for _ in range(spec.count):
                        lam = spec.lam(prng, fam.N)
                        worst = max(worst, max_abs(rt(lam) - rep(lam)))
            out.append(_check(f"dual_round_trips/{label}", worst, 1e-9, seed))
            A = _weight_block_matrix(rng, W.weights)
            W1 = alg.gauge_rep(W, A)
            As = alg.dual_morphism(A, W1.weights, fam.gamma)
            worst = 0.0
            for side in ("right", "left"):
                worst = max(worst, alg.check_intertwiner(As, alg.dual_rep(W, side), alg.dual_rep(W1, side), spec).max_abs)
            out.append(_check(f"dual_morphism/{label}", worst, 1e-9, seed, base=alg.check_intertwiner(A, W1, W, spec).max_abs))
            return out

        checks += _guarded(label, seed, 1e-9, run)
    return CriterionResult(8, "representation calculus: RLL, tensor products, duals", checks)


# ---------------------------------------------------------------------------
# 9: PBW


def criterion_9(seed: int) -> CriterionResult:
    rng = _rng(seed, 9)
    spec = _specs(seed, radius=1.5)
    checks = []

    def families(N):
        return [
            ("identity", cons.identity_family(N)),
            ("rational_full", cons.rational_hecke_R(cons.IntervalDecomposition.full(N))),
            ("rational_random", cons.rational_hecke_R(random_decomposition(rng, N), random_mu(rng, N, "additive"))),
            ("trig_full", cons.trig_hecke_R(cons.IntervalDecomposition.full(N), random_epsilon(rng))),
            ("trig_random", cons.trig_hecke_R(random_decomposition(rng, N), random_epsilon(rng), random_mu(rng, N, "multiplicative"))),
            ("trig_empty", cons.trig_hecke_R(cons.IntervalDecomposition.empty(N), random_epsilon(rng))),
            ("frt", cons.frt_constant_R(rng.permutation(N), cmath.exp(random_epsilon(rng)))),
        ]

    for N, degree in ((2, 2), (3, 2), (2, 3)):
        for name, fam in families(N):
            label = f"pbw/degree={degree}/N={N}/{name}"

            def run(fam=fam, degree=degree, label=label):
                rep = alg.pbw_rank_check(fam, degree, 3, spec)
                return [Check(label, rep.passes, float(rep.quotient_dim - rep.expected_quotient), 0.5, seed, {"rank": rep.rank, "quotient": rep.quotient_dim, "expected": rep.expected_quotient, "ranks": list(rep.ranks)})]

            checks += _guarded(label, seed, 0.5, run)
    return CriterionResult(9, "PBW ranks in degrees 2 and 3", checks)


# ---------------------------------------------------------------------------
# 10-11: limits


def criterion_10(seed: int) -> CriterionResult:
    rng = _rng(seed, 10)
    spec = _specs(seed, count=5)
    checks = []
    for N in (2, 3):
        label = f"elliptic_to_trig/N={N}"

        def run(N=N, label=label):
            seq = verify.degeneration_check("elliptic_to_trig", {"N": N}, spec, raise_on_fail=False)
            vals = [r.max_abs for r in seq]
            mono = all(b < a for a, b in zip(vals, vals[1:]))
            return [
                _check(label, vals[-1], 1e-6, seed, sequence=vals, T=[2, 4, 8]),
                Check(f"{label}/monotone", mono, None, None, seed, {"sequence": vals}),
            ]

        checks += _guarded(label, seed, 1e-6, run)
    for N in (2, 3):
        d = random_decomposition(rng, N, nontrivial=False)
        label = f"trig_to_rational/N={N}/X={list(d.intervals)}"

        def run(N=N, d=d, label=label):
            seq = verify.degeneration_check("trig_to_rational", {"N": N, "decomposition": d}, spec, raise_on_fail=False)
            vals = [r.max_abs for r in seq]
            return [_check(label, vals[-1], 1e-4, seed, sequence=vals, eps=[1e-2, 1e-3, 1e-4])]

        checks += _guarded(label, seed, 1e-4, run)
    for i in range(5):
        N = 2 + i % 3
        sigma = rng.permutation(N)
        label = f"frt_extrapolation/sigma={sigma.tolist()}"

        def run(sigma=sigma, label=label):
            seq = verify.degeneration_check("frt_extrapolation", {"sigma": sigma}, spec, raise_on_fail=False)
            vals = [r.max_abs for r in seq]
            return [_check(label, vals[-1], 1e-6, seed, sequence=vals, t=[10, 25, 50])]

        checks += _guarded(label, seed, 1e-6, run)
    return CriterionResult(10, "degeneration limits", checks)


def _dense_dev(r, ref, pts, spectral):
    worst = 0.0
    for pt in pts:
        if spectral:
            a, b = to_dense(r.op(pt["z"], pt["lambda"])), to_dense(ref.op(pt["z"], pt["lambda"]))
        else:
            a, b = to_dense(r.op(pt["lambda"])), to_dense(ref.op(pt["lambda"]))
        worst = max(worst, max_abs(a - b))
    return worst


def criterion_11(seed: int) -> CriterionResult:
    checks = []
    tol = 1e-5
    for N in (2, 3):
        d = cons.IntervalDecomposition.full(N)
        spec = _specs(seed, count=5, radius=1.5)
        prng = spec.rng(11)
        pts = [{"lambda": spec.lam(prng, N)} for _ in range(spec.count)]

        def run_rat(N=N, d=d, pts=pts):
            lim = gauge.classical_limit_family(lambda g: cons.rational_hecke_R(d, step=g), N)
            form = gauge.DifferentialForm(2, N, lambda idx, lam: 1 / (lam[idx[0]] - lam[idx[1]]), {"type": "inverse_difference"})
            r = gauge.gauge_classical(lim, gauge.GaugeMove("closed_two_form", {"form": form}))
            return [_check(f"quasiclassical/rational_hecke/N={N}", _dense_dev(r, cons.classical_r("rational", d), pts, False), tol, seed)]

        checks += _guarded(f"quasiclassical/rational_hecke/N={N}", seed, tol, run_rat)

        p = thetafn.EllipticParams(2j)
        # keep z away from the pole at 0, where gamma / z is not small
        espec = _specs(seed, count=4, radius=0.5, z_radius=0.2, z_center=0.45)
        prng = espec.rng(12)
        epts = [{"lambda": espec.lam(prng, N), "z": espec.z(prng)[0]} for _ in range(espec.count)]

        def run_ell(N=N, p=p, epts=epts):
            lim = gauge.classical_limit_family(lambda g: cons.spectral_elliptic_R(N, g, p), N, spectral=True)
            form = gauge.DifferentialForm(2, N, lambda idx, lam: thetafn.rho(lam[idx[0]] - lam[idx[1]], p), {"type": "rho_difference"})
            r = gauge.gauge_classical(lim, gauge.GaugeMove("closed_two_form", {"form": form}), check_spec=verify.SampleSpec(count=2, radius=0.5))
            r = gauge.gauge_classical(r, gauge.GaugeMove("add_identity", {"f": lambda z: thetafn.rho(z, p)}))
            ref = cons.classical_spectral_r("elliptic", p=p, N=N)
            return [_check(f"quasiclassical/elliptic/N={N}", _dense_dev(r, ref, epts, True), tol, seed)]

        checks += _guarded(f"quasiclassical/elliptic/N={N}", seed, tol, run_ell)

    N = 3
    d = cons.IntervalDecomposition.full(N)
    p = thetafn.EllipticParams(2j)
    classical = [
        ("classical_rational", cons.classical_r("rational", d), _specs(seed, count=6, radius=1.5), None),
        ("classical_trig", cons.classical_r("trig", d), _specs(seed, count=6, radius=1.5), (2.0, 0.0)),
        ("classical_spectral_rational", cons.classical_spectral_r("rational", d), _specs(seed, count=6, radius=1.5, z_center=0.5), (1.0, 0.0)),
        ("classical_spectral_trig", cons.classical_spectral_r("trig", d), _specs(seed, count=6, radius=1.0, z_radius=0.5, z_center=0.6), None),
        ("classical_spectral_elliptic", cons.classical_spectral_r("elliptic", p=p, N=N), _specs(seed, count=4, radius=0.5, z_radius=0.2, z_center=0.45), None),
    ]
    for name, fam, spec, coupling in classical:

        def run(name=name, fam=fam, spec=spec, coupling=coupling):
            out = [_check(f"cdyb/{name}", verify.check_cdyb(fam, spec).max_abs, 1e-6, seed)]
            if coupling is not None:
                rep = verify.check_classical_unitarity_and_residue(fam, spec)
                dev = max(abs(rep.epsilon - coupling[0]), abs(rep.delta - coupling[1]))
                out.append(_check(f"coupling/{name}", dev, 1e-6, seed, epsilon=rep.epsilon, delta=rep.delta, fit=rep.residual.max_abs))
            return out

        checks += _guarded(f"cdyb/{name}", seed, 1e-6, run)
    return CriterionResult(11, "quasiclassical limits, CDYB and coupling constants", checks)


# ---------------------------------------------------------------------------
# registry


CRITERIA: dict = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}

SUITES: dict = {
    "canonical": (1, 2, 3),
    "gauge": (4, 5),
    "classify": (6,),
    "rigidity": (7, 8),
    "pbw": (9,),
    "limits": (10, 11),
    "all": tuple(range(1, 12)),
}


def run_criterion(number: int, seed: int) -> CriterionResult:
    if number not in CRITERIA:
        raise InputError(f"unknown criterion {number}")
    return CRITERIA[number](int(seed))


def run_suite(name: str, seed: int) -> list:
    """All criteria of a suite, in order."""
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [run_criterion(k, seed) for k in SUITES[name]]
