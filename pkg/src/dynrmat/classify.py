"""Recover the canonical form of a Hecke-type dynamical R-matrix.

The pipeline measures the Hecke parameters, normalizes step and ``p`` to 1,
fixes ``alpha_ac = q + beta_ac`` by a closed 2-form, reads off the
quasiconstants ``mu_ac`` from ``beta_ac`` and reorders indices so that the
related indices form consecutive intervals.
"""

from __future__ import annotations

import cmath
import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import constructors as cons
from . import gauge, verify
from .errors import (
    ClassificationError,
    CyclicOrder,
    DynRMatError,
    EvaluationPole,
    InconsistentCocycle,
    NotHecke,
    NotQuasiconstant,
    NotTransitive,
)
from .tensorspace import max_abs

__all__ = [
    "ParamReport",
    "CanonicalForm",
    "measure_params",
    "normalize",
    "extract_mu",
    "build_decomposition",
    "classify",
    "strip_singletons",
    "CLASSIFY_SPEC",
]

# generic samples used by every stage
CLASSIFY_SPEC = verify.SampleSpec(count=8, radius=2.0, seed=0)
BETA_TOL = 1e-8
QUASICONST_TOL = 1e-7
HECKE_TOL = 1e-6


@dataclass(frozen=True)
class ParamReport:
    p: complex
    q: complex
    hecke: verify.Residual
    qdyb: verify.Residual

    def __iter__(self):
        return iter((self.p, self.q, self))


def measure_params(fam: cons.RFamily, spec: verify.SampleSpec | None = None) -> ParamReport:
    """Hecke parameters ``(p, q)`` and the QDYB residual at the family's step."""
    spec = spec or CLASSIFY_SPEC
    try:
        rep = verify.check_hecke(fam, spec=spec, p_tol=HECKE_TOL)
    except DynRMatError as e:
        if isinstance(e, EvaluationPole):
            raise
        raise NotHecke(str(e)) from e
    scale = max(1.0, abs(rep.p), abs(rep.q))
    if rep.residual.max_abs > HECKE_TOL * scale:
        raise NotHecke(f"Hecke relation violated by {rep.residual.max_abs:.3e}")
    if abs(rep.p + rep.q) < HECKE_TOL * scale:
        raise NotHecke("p = -q is excluded")
    qd = verify.check_qdyb(fam, spec)
    return ParamReport(rep.p, rep.q, rep.residual, qd)


def normalize(fam: cons.RFamily, params: ParamReport | None = None, spec: verify.SampleSpec | None = None) -> cons.RFamily:
    """Step 1, ``p = 1`` and ``alpha_ac = q + beta_ac``."""
    if params is None:
        params = measure_params(fam, spec)
    out = fam
    if abs(complex(fam.gamma) - 1) > 1e-15:
        out = gauge.gauge_constant(out, gauge.GaugeMove("affine", {"c": complex(fam.gamma), "mu": np.zeros(fam.N)}))
    if abs(params.p - 1) > 1e-15:
        out = gauge.gauge_constant(out, gauge.GaugeMove("scale", {"c": 1 / params.p}))
    _, out = gauge.gauge_fixing_two_form(out, params.q / params.p)
    return out


def _sample_points(N, spec):
    rng = spec.rng(7)
    pts = []
    for _ in range(spec.count):
        lam = spec.lam(rng, N)
        pts.append(lam)
    return pts


def _beta_samples(fam, pts, a, c):
    """``beta_ac`` at every point and at its shifts by ``-omega_a``, ``-omega_c``."""
    out = []
    for lam in pts:
        for shift in (None, a, c):
            l2 = lam.copy()
            if shift is not None:
                l2[shift] -= 1
            out.append((l2, fam.op(l2).beta[a, c]))
    return out


def extract_mu(fam: cons.RFamily, q: complex, spec: verify.SampleSpec | None = None):
    """Quasiconstants of a normalized family.

    Returns ``(mu, related)``. For ``q = 1`` the table is additive and
    ``related[a, c]`` marks pairs with ``beta_ac`` not identically zero
    (unrelated entries are ``nan``). For ``q != 1`` the table is
    multiplicative with ``inf`` for ``beta = 0`` and ``0`` for
    ``beta = 1 - q``; ``related`` marks the finite, nonzero entries.
    """
    spec = spec or CLASSIFY_SPEC
    N = fam.N
    q = complex(q)
    additive = abs(q - 1) < HECKE_TOL
    eps = cmath.log(q)
    pts = _sample_points(N, spec)
    mu = np.full((N, N), np.nan, dtype=complex)
    related = np.zeros((N, N), dtype=bool)
    for a, c in itertools.permutations(range(N), 2):
        samples = _beta_samples(fam, pts, a, c)
        betas = np.array([b for _, b in samples])
        if additive:
            if np.all(np.abs(betas) < BETA_TOL):
                continue
            if np.any(np.abs(betas) < BETA_TOL):
                raise NotQuasiconstant((a, c), float("inf"))
            vals = np.array([l[a] - l[c] - 1 / b for l, b in samples])
        else:
            if np.all(np.abs(betas) < BETA_TOL):
                mu[a, c] = complex(np.inf, 0)
                continue
            if np.all(np.abs(betas - (1 - q)) < BETA_TOL):
                mu[a, c] = 0
                continue
            if np.any(np.abs(betas) < BETA_TOL):
                raise NotQuasiconstant((a, c), float("inf"))
            vals = np.array([(b + q - 1) / b * np.exp(-eps * (l[a] - l[c])) for l, b in samples])
        m = complex(np.mean(vals))
        spread = max_abs(vals - m)
        if spread > QUASICONST_TOL * max(1.0, abs(m)):
            raise NotQuasiconstant((a, c), spread)
        mu[a, c] = m
        related[a, c] = True
    _check_laws(mu, related, additive)
    if additive:
        # enforce exact antisymmetry
        for a, c in itertools.combinations(range(N), 2):
            if related[a, c]:
                m = 0.5 * (mu[a, c] - mu[c, a])
                mu[a, c], mu[c, a] = m, -m
        return cons.QuasiconstantTable("additive", mu), related
    return cons.QuasiconstantTable("multiplicative", mu), related


def _close(x, y, tol=1e-6):
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def _check_laws(mu, related, additive):
    N = mu.shape[0]
    for a, c in itertools.combinations(range(N), 2):
        if additive:
            if related[a, c] != related[c, a]:
                raise InconsistentCocycle(f"beta_{a}{c} and beta_{c}{a} disagree on vanishing")
            if related[a, c] and not _close(mu[a, c], -mu[c, a]):
                raise InconsistentCocycle(f"mu_{a}{c} != -mu_{c}{a}")
        else:
            x, y = mu[a, c], mu[c, a]
            if np.isinf(x) or np.isinf(y) or x == 0 or y == 0:
                if not ((np.isinf(x) and y == 0) or (np.isinf(y) and x == 0)):
                    raise InconsistentCocycle(f"pair {(a, c)} is not a (0, inf) pair: {x}, {y}")
            elif not _close(x * y, 1):
                raise InconsistentCocycle(f"mu_{a}{c} mu_{c}{a} = {x * y}")
    if N < 3:
        return
    for a, b, c in itertools.permutations(range(N), 3):
        if additive:
            if related[a, b] and related[b, c]:
                if not related[a, c]:
                    raise NotTransitive(f"{a}~{b}~{c} but not {a}~{c}")
                if not _close(mu[a, b] + mu[b, c], mu[a, c]):
                    raise InconsistentCocycle(f"mu_{a}{b} + mu_{b}{c} != mu_{a}{c}")
        elif not _cocycle_holds(mu[a, b], mu[b, c], mu[a, c]):
            raise InconsistentCocycle(f"mu_{a}{b} mu_{b}{c} = mu_{a}{c} fails for {(a, b, c)}")


def _cocycle_holds(ab, bc, ac):
    def kind(x):
        return "inf" if np.isinf(x) else ("zero" if x == 0 else "fin")

    k = (kind(ab), kind(bc), kind(ac))
    if k == ("fin", "fin", "fin"):
        return _close(ab * bc, ac)
    if k[2] == "inf":
        return "inf" in k[:2]
    if k[2] == "zero":
        return "zero" in k[:2]
    return sorted(k[:2]) == ["inf", "zero"]


def strip_singletons(d: cons.IntervalDecomposition) -> cons.IntervalDecomposition:
    """Drop one-point intervals, which carry no in-block pair."""
    return cons.IntervalDecomposition(d.N, tuple(iv for iv in d.intervals if iv[1] > iv[0]))


def _classes(related, N):
    seen, out = set(), []
    for a in range(N):
        if a in seen:
            continue
        cls = sorted({a} | {b for b in range(N) if related[a, b]})
        for b in cls:
            if b != a and set(cls) != ({b} | {c for c in range(N) if related[b, c]}):
                raise NotTransitive(f"the relation on indices {cls} is not transitive")
        seen.update(cls)
        out.append(cls)
    return out


def _topological_order(Y, N):
    """Stable topological order: ``a`` before ``b`` whenever ``Y[a, b]``."""
    indeg = Y.sum(axis=0).astype(int)
    heap = [a for a in range(N) if indeg[a] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        a = heapq.heappop(heap)
        order.append(a)
        for b in np.nonzero(Y[a])[0]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, int(b))
    if len(order) < N:
        raise CyclicOrder(f"no order places every infinite pair forward (stuck after {order})")
    return order


def build_decomposition(mu: cons.QuasiconstantTable, related=None):
    """Permutation ``sigma`` (old index ``a`` goes to ``sigma[a]``) and intervals.

    Additive case: the related classes become intervals, ordered by their
    smallest member, with unrelated singletons placed after them. Multiplicative case: ``Y = {mu = inf}`` ordered forward
    by a stable topological sort, and classes of finite entries become
    intervals.
    """
    N = mu.N
    v = mu.values
    if mu.case == "additive":
        if related is None:
            related = np.isfinite(v) & ~np.eye(N, dtype=bool)
        cls = sorted(_classes(related, N), key=lambda c: (len(c) == 1, min(c)))
        order = [a for c in cls for a in c]
        sigma = np.argsort(order)
        ivs, pos = [], 0
        for c in cls:
            if len(c) > 1:
                ivs.append((pos, pos + len(c) - 1))
            pos += len(c)
        return sigma, cons.IntervalDecomposition(N, tuple(ivs))
    off = ~np.eye(N, dtype=bool)
    Y = np.isinf(v) & off
    if np.any(Y & Y.T):
        a, b = map(int, np.argwhere(Y & Y.T)[0])
        raise NotTransitive(f"both ({a},{b}) and ({b},{a}) have infinite quasiconstant")
    for a, b, c in itertools.permutations(range(N), 3):
        if Y[a, b] and Y[b, c] and not Y[a, c]:
            raise NotTransitive(f"({a},{b}) and ({b},{c}) infinite but ({a},{c}) is not")
    order = _topological_order(Y, N)
    sigma = np.argsort(order)
    fin = np.isfinite(v) & (v != 0) & off
    Z = np.zeros((N, N), dtype=bool)
    for i, j in itertools.combinations(range(N), 2):
        Z[i, j] = fin[order[i], order[j]]
    for i, j in itertools.combinations(range(N), 2):
        if Z[i, j] != all(Z[k, k + 1] for k in range(i, j)):
            raise InconsistentCocycle(f"finite pairs do not form intervals at positions {(i, j)}")
    ivs, start = [], 0
    for k in range(N):
        if k == N - 1 or not Z[k, k + 1]:
            if k > start:
                ivs.append((start, k))
            start = k + 1
    return sigma, cons.IntervalDecomposition(N, tuple(ivs))


def _permute_table(mu: cons.QuasiconstantTable, sigma) -> cons.QuasiconstantTable:
    v = np.full_like(mu.values, np.nan)
    v[np.ix_(sigma, sigma)] = mu.values
    return cons.QuasiconstantTable(mu.case, v)


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    case: str
    p: complex
    q: complex
    gamma_original: complex
    sigma: np.ndarray
    decomposition: cons.IntervalDecomposition
    mu: cons.QuasiconstantTable
    gauge_chain: list = field(default_factory=list)
    contract_residual: float | None = None

    @property
    def epsilon(self) -> complex:
        return cmath.log(self.q)

    def family(self) -> cons.RFamily:
        """The canonical family this form describes."""
        if self.case == "p_eq_q":
            v = np.where(self.decomposition.same_block_table(), self.mu.values, 0)
            return cons.rational_hecke_R(self.decomposition, cons.QuasiconstantTable("additive", v))
        good = self.decomposition.same_block_table()
        v = np.where(good, self.mu.values, 1)
        return cons.trig_hecke_R(self.decomposition, self.epsilon, cons.QuasiconstantTable("multiplicative", v))

    def mu_json(self) -> dict:
        out = {}
        N = self.mu.N
        for a, b in itertools.permutations(range(N), 2):
            x = self.mu.values[a, b]
            if np.isnan(x):
                continue
            out[f"{a},{b}"] = "inf" if np.isinf(x) else [float(x.real), float(x.imag)]
        return out

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "p": [float(self.p.real), float(self.p.imag)],
            "q": [float(self.q.real), float(self.q.imag)],
            "gamma_original": [float(complex(self.gamma_original).real), float(complex(self.gamma_original).imag)],
            "sigma": [int(s) for s in self.sigma],
            "X": [list(iv) for iv in self.decomposition.intervals],
            "mu": self.mu_json(),
            "gauge_chain": self.gauge_chain,
            "contract_residual": self.contract_residual,
        }


def _staged(stage, f, *args, **kw):
    try:
        return f(*args, **kw)
    except ClassificationError:
        raise
    except DynRMatError as e:
        raise ClassificationError(stage, e) from e


def classify(fam: cons.RFamily, spec: verify.SampleSpec | None = None, *, contract_tol: float = 1e-7) -> CanonicalForm:
    """Full pipeline; failures are wrapped in :class:`ClassificationError`."""
    spec = spec or CLASSIFY_SPEC
    params = _staged("measure", measure_params, fam, spec)
    norm = _staged("normalize", normalize, fam, params, spec)
    q = params.q / params.p
    mu, related = _staged("extract_mu", extract_mu, norm, q, spec)
    sigma, d = _staged("decomposition", build_decomposition, mu, related)
    permuted = _staged("normalize", gauge.gauge_constant, norm, gauge.GaugeMove("perm", {"sigma": sigma}))
    n_before = len(fam.meta.get("gauge_chain", []))
    chain = permuted.meta.get("gauge_chain", [])[n_before:]
    case = "p_eq_q" if mu.case == "additive" else "p_ne_q"
    form = CanonicalForm(case, complex(1.0), complex(q), complex(fam.gamma), sigma, d, _permute_table(mu, sigma), chain)
    canon = form.family()

    def ev(pt):
        return max_abs(canon.dense(pt["lambda"]) - permuted.dense(pt["lambda"]))

    res = _staged("contract", verify.sweep, ev, verify._lam_draw(fam.N, spec), spec)
    if res.max_abs > contract_tol:
        raise ClassificationError("contract", f"canonical family deviates by {res.max_abs:.3e}")
    return CanonicalForm(form.case, form.p, form.q, form.gamma_original, sigma, d, form.mu, form.gauge_chain, res.max_abs)
