"""Command-line front end.

Commands: ``construct``, ``verify``, ``gauge``, ``classify``, ``rigidity``,
``pbw``, ``limits``, ``suite`` and ``export``. Family flags are shared by
all commands; a JSON ``--config`` file may supply any flag (keys use the
flag names with dashes replaced by underscores) and an ``--input`` file may
hold a family descriptor or a matrix file.

Exit codes: 0 all checks pass, 1 a check failed (the report is still
written), 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import cmath
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from . import algebroid as alg
from . import classify as clf
from . import constructors as cons
from . import gauge
from . import matrixfile as mf
from . import suites
from . import thetafn
from . import verify
from .errors import DynRMatError, InputError, NumericalError

SEED_ENV = "DYNRMAT_SEED"
REPORT_SCHEMA = 1

FAMILIES = (
    "identity",
    "rational_hecke",
    "trig_hecke",
    "frt",
    "spectral_rational",
    "spectral_trig",
    "spectral_elliptic",
    "classical_rational",
    "classical_trig",
    "classical_spectral_rational",
    "classical_spectral_trig",
    "classical_spectral_elliptic",
)
VERIFY_CHECKS = ("qdyb", "unitarity", "hecke", "zero_weight", "coordinates", "cdyb", "coupling")

DEFAULTS = {
    "samples": 20,
    "radius": 2.0,
    "z_radius": 1.0,
    "z_center": 0.0,
    "tol": None,
    "degree": 2,
    "trials": 3,
    "shift_sign": -1,
}

DEFAULT_TOL = {
    "qdyb": 1e-8,
    "unitarity": 1e-8,
    "hecke": 1e-10,
    "zero_weight": 1e-14,
    "coordinates": 1e-10,
    "cdyb": 1e-6,
    "coupling": 1e-6,
    "gauge": 1e-7,
    "rigidity": 1e-9,
    "crossing": 1e-8,
}


class UsageError(InputError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return mf.decode_complex(v)
    if isinstance(v, (int, float, complex)):
        return complex(v)
    s = str(v).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        try:
            return mf.decode_complex(json.loads(s))
        except (json.JSONDecodeError, InputError):
            raise UsageError(f"cannot read {v!r} as a complex number") from None


def parse_ranges(spec, N: int) -> list:
    """``"1-3,5"`` (1-based, inclusive) to 0-based indices."""
    if isinstance(spec, (list, tuple)):
        items = [str(x) for x in spec]
    else:
        s = str(spec).strip()
        if s.lower() in ("", "none", "empty"):
            return []
        items = s.split(",")
    out = []
    for it in items:
        it = it.strip()
        try:
            if "-" in it:
                a, b = (int(t) for t in it.split("-", 1))
            else:
                a = b = int(it)
        except ValueError:
            raise UsageError(f"bad range {it!r}; use forms like 1-3,5") from None
        if not (1 <= a <= b <= N):
            raise UsageError(f"range {it!r} is outside 1..{N}")
        out.extend(range(a - 1, b))
    return out


def parse_permutation(v) -> np.ndarray:
    """1-based permutation, as ``"2,3,1"`` or a list, to a 0-based array."""
    items = v if isinstance(v, (list, tuple)) else str(v).split(",")
    try:
        return np.array([int(t) - 1 for t in items])
    except ValueError:
        raise UsageError(f"bad permutation {v!r}; use forms like 2,3,1") from None


def parse_json_arg(v):
    """Inline JSON, or a path to a JSON file."""
    if not isinstance(v, str):
        return v
    if os.path.exists(v):
        with open(v) as fh:
            try:
                return json.load(fh)
            except json.JSONDecodeError as e:
                raise UsageError(f"{v}: malformed JSON ({e})") from None
    try:
        return json.loads(v)
    except json.JSONDecodeError as e:
        raise UsageError(f"cannot parse {v!r} as JSON or find it as a file ({e})") from None


def parse_mu(v, N: int, case: str) -> cons.QuasiconstantTable:
    """A list is a potential ``m`` (``mu_ab = m_a - m_b`` or ``m_a / m_b``)."""
    v = parse_json_arg(v)
    if isinstance(v, dict) and "potential" in v:
        v = v["potential"]
    if isinstance(v, list):
        m = parse_vector(v, N)
        if case == "multiplicative" and np.any(m == 0):
            raise UsageError("multiplicative potentials must be nonzero")
        return cons.QuasiconstantTable.from_potential(m, case)
    if isinstance(v, dict) and "table" in v:
        rows = v["table"]
        T = np.full((N, N), np.nan, dtype=complex)
        for a in range(N):
            for b in range(N):
                x = rows[a][b]
                if a == b or x is None:
                    continue
                T[a, b] = complex(np.inf) if x == "inf" else parse_complex(x)
        return cons.QuasiconstantTable(case, T)
    raise UsageError('mu must be a list of N potential values or {"table": [[...]]}')


def parse_vector(v, N: int | None = None) -> np.ndarray:
    v = parse_json_arg(v)
    if not isinstance(v, list):
        raise UsageError("expected a JSON list")
    out = np.array([parse_complex(x) for x in v], dtype=complex)
    if N is not None and len(out) != N:
        raise UsageError(f"expected {N} entries, got {len(out)}")
    return out


def _int_at_least(name, v, lo):
    try:
        i = int(v)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be an integer") from None
    if i < lo:
        raise UsageError(f"{name} must be at least {lo}, got {i}")
    return i


# ---------------------------------------------------------------------------
# family descriptors


def build_family(o: dict):
    """Family (with an optional gauge chain) from a descriptor dictionary."""
    name = o.get("family")
    if name is None:
        raise UsageError("no family given (use --family or --input)")
    if name not in FAMILIES:
        raise UsageError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    if name == "frt" and o.get("sigma") is not None:
        sigma = parse_permutation(o["sigma"])
        N = len(sigma)
        if o.get("N") is not None and int(o["N"]) != N:
            raise UsageError("sigma length differs from N")
    else:
        if o.get("N") is None:
            raise UsageError("N is required")
        N = _int_at_least("N", o["N"], 1)
        sigma = np.arange(N)
    X = o.get("X")
    d = cons.IntervalDecomposition.full(N) if X is None else cons.decompose(parse_ranges(X, N), N)
    step = parse_complex(o["step"]) if o.get("step") is not None else 1.0
    gamma = parse_complex(o["gamma"]) if o.get("gamma") is not None else None

    def epsilon():
        if o.get("epsilon") is not None:
            return parse_complex(o["epsilon"])
        if o.get("q") is not None:
            q = parse_complex(o["q"])
            if q == 0:
                raise UsageError("q must be nonzero")
            return cmath.log(q)
        raise UsageError(f"{name} needs --q or --epsilon")

    def tau():
        return thetafn.EllipticParams(parse_complex(o.get("tau") or "2j"))

    mu_case = "additive" if name == "rational_hecke" else "multiplicative"
    mu = parse_mu(o["mu"], N, mu_case) if o.get("mu") is not None else None
    if name == "identity":
        fam = cons.identity_family(N, gamma if gamma is not None else 1.0)
    elif name == "rational_hecke":
        fam = cons.rational_hecke_R(d, mu, step=step)
    elif name == "trig_hecke":
        fam = cons.trig_hecke_R(d, epsilon(), mu, step=step)
    elif name == "frt":
        fam = cons.frt_constant_R(sigma, parse_complex(o["q"]) if o.get("q") is not None else cmath.exp(epsilon()))
    elif name == "spectral_rational":
        fam = cons.spectral_rational_R(d, gamma if gamma is not None else 0.5)
    elif name == "spectral_trig":
        fam = cons.spectral_trig_R(d, gamma if gamma is not None else 0.5)
    elif name == "spectral_elliptic":
        fam = cons.spectral_elliptic_R(N, gamma if gamma is not None else 0.3, tau())
    elif name == "classical_rational":
        fam = cons.classical_r("rational", d)
    elif name == "classical_trig":
        fam = cons.classical_r("trig", d)
    elif name == "classical_spectral_elliptic":
        fam = cons.classical_spectral_r("elliptic", p=tau(), N=N)
    else:
        fam = cons.classical_spectral_r(name.rsplit("_", 1)[1], d)
    chain = o.get("chain")
    if chain:
        fam = gauge.apply_chain(fam, parse_chain(chain, N, fam))
    return fam


def parse_chain(chain, N, fam) -> list:
    chain = parse_json_arg(chain)
    if isinstance(chain, dict):
        chain = [chain]
    if not isinstance(chain, list):
        raise UsageError("a gauge chain is a JSON list of moves")
    g = complex(getattr(fam, "gamma", 1.0))
    moves = []
    for d in chain:
        if not isinstance(d, dict):
            raise UsageError("each gauge move is a JSON object with a 'kind'")
        m = gauge.GaugeMove.from_json(d, N, g)
        if m.kind == "affine":
            g = g / complex(m.payload.get("c", 1))
        moves.append(m)
    return moves


def load_input(path):
    """``(family, descriptor)`` from a descriptor or matrix file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e})") from None
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    if isinstance(doc, dict) and "points" in doc:
        return mf.read_matrix_file(doc), None
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return None, doc


FAMILY_KEYS = ("family", "N", "X", "q", "epsilon", "mu", "step", "gamma", "sigma", "tau", "chain")


def descriptor(o) -> dict | None:
    """Family descriptor from ``--input`` (if a descriptor) overridden by explicit flags.

    ``None`` when the input is a matrix file.
    """
    base = {}
    if o.get("input"):
        fam, desc = load_input(o["input"])
        if fam is not None:
            return None
        base = dict(desc)
    base.update({k: o[k] for k in FAMILY_KEYS if o.get(k) is not None})
    return base


def _family(o):
    desc = descriptor(o)
    if desc is None:
        fam, _ = load_input(o["input"])
        if o.get("chain"):
            fam = gauge.apply_chain(fam, parse_chain(o["chain"], fam.N, fam))
        return fam
    return build_family(desc)


def _spec(o, **override) -> verify.SampleSpec:
    kw = dict(
        count=_int_at_least("samples", o["samples"], 1),
        radius=float(o["radius"]),
        z_radius=float(o["z_radius"]),
        z_center=parse_complex(o["z_center"]),
        seed=int(o["seed"]),
    )
    kw.update(override)
    if kw["radius"] <= 0 or kw["z_radius"] <= 0:
        raise UsageError("sampling radii must be positive")
    return verify.SampleSpec(**kw)


def _tol(o, key):
    t = o.get("tol")
    t = DEFAULT_TOL[key] if t is None else float(t)
    if not t > 0:
        raise UsageError("tolerances must be positive")
    return t


# ---------------------------------------------------------------------------
# reports


def report(name: str, checks: list, seed: int, **extra) -> dict:
    out = {"schema": REPORT_SCHEMA, "version": __version__, "suite": name, "seed": seed}
    out.update(extra)
    out["checks"] = [c.to_json() for c in checks]
    out["summary"] = {"passed": sum(c.passed for c in checks), "failed": sum(not c.passed for c in checks)}
    out["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return out


def exit_code(checks) -> int:
    if any(c.numerical_error for c in checks):
        return 3
    return 0 if all(c.passed for c in checks) else 1


def to_jsonable(x):
    """Plain JSON data; complex numbers become ``[re, im]``, non-finite floats strings."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [to_jsonable(x.real), to_jsonable(x.imag)]
    if isinstance(x, cons.QuasiconstantTable):
        return {"case": x.case, "values": to_jsonable(x.values)}
    if isinstance(x, cons.IntervalDecomposition):
        return [list(iv) for iv in x.intervals]
    if isinstance(x, gauge.GaugeMove):
        return to_jsonable(x.to_json())
    if x is None or isinstance(x, str):
        return x
    return {"type": "opaque"}


def _emit(doc, o):
    text = json.dumps(to_jsonable(doc), indent=2)
    if o.get("out"):
        with open(o["out"], "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _residual_check(name, res: verify.Residual, tol, seed) -> suites.Check:
    return suites.Check(name, res.passes(tol), res.max_abs, tol, seed, {"samples": res.samples_used, "resampled": res.resampled, "argmax": res.argmax})


def _numerical_check(name, e, tol, seed) -> suites.Check:
    return suites.Check(name, False, None, tol, seed, error=f"{type(e).__name__}: {e}", numerical_error=True)


# ---------------------------------------------------------------------------
# commands


def cmd_construct(o):
    fam = _family(o)
    spec = _spec(o)
    if o.get("lambda") is not None:
        pts = [{"lambda": parse_vector(o["lambda"], fam.N)}]
    else:
        rng = spec.rng(0)
        pts = [{"lambda": spec.lam(rng, fam.N)}]
    if isinstance(fam, (cons.SpectralRFamily,)):
        for p in pts:
            p["z"] = parse_complex(o["z"]) if o.get("z") is not None else spec.z(spec.rng(1))[0]
    if isinstance(fam, (cons.ClassicalRFamily, cons.SpectralClassicalRFamily)):
        p = pts[0]
        D = fam.dense(p["z"], p["lambda"]) if "z" in p else fam.dense(p["lambda"])
        doc = {"schema": REPORT_SCHEMA, "version": __version__, "meta": fam.meta, "lambda": p["lambda"], "matrix": [mf.encode_complex(x) for x in D.ravel()]}
    else:
        doc = {"schema": REPORT_SCHEMA, "version": __version__, "meta": fam.meta, "matrix_file": mf.export_family(fam, pts)}
    _emit(doc, o)
    return 0


def cmd_verify(o):
    check = o["check"]
    fam = _family(o)
    seed = int(o["seed"])
    tol = _tol(o, check)
    spec = _spec(o)
    checks = []
    try:
        if check == "qdyb":
            if isinstance(fam, cons.SpectralRFamily):
                r = verify.check_qdyb_spectral(fam, spec)
            elif isinstance(fam, cons.RFamily):
                r = verify.check_qdyb(fam, spec)
            else:
                raise UsageError("qdyb needs a quantum family")
            checks.append(_residual_check("qdyb", r, tol, seed))
        elif check == "unitarity":
            if not isinstance(fam, cons.SpectralRFamily):
                raise UsageError("unitarity needs a spectral family")
            checks.append(_residual_check("unitarity", verify.check_unitarity(fam, spec), tol, seed))
        elif check == "zero_weight":
            checks.append(_residual_check("zero_weight", verify.check_zero_weight(fam, spec), tol, seed))
        elif check == "hecke":
            if not isinstance(fam, cons.RFamily):
                raise UsageError("hecke needs a family without spectral parameter")
            rep = verify.check_hecke(fam, spec=spec)
            c = _residual_check("hecke", rep.residual, tol, seed)
            c.detail.update(p=rep.p, q=rep.q)
            checks.append(c)
        elif check == "coordinates":
            if not isinstance(fam, cons.RFamily):
                raise UsageError("coordinates needs a family without spectral parameter")
            for k, r in verify.check_coordinate_relations(fam, None, spec).items():
                checks.append(_residual_check(f"coordinates/{k}", r, tol, seed))
        elif check == "cdyb":
            if not isinstance(fam, (cons.ClassicalRFamily, cons.SpectralClassicalRFamily)):
                raise UsageError("cdyb needs a classical family")
            checks.append(_residual_check("cdyb", verify.check_cdyb(fam, spec), tol, seed))
        elif check == "coupling":
            if not isinstance(fam, (cons.ClassicalRFamily, cons.SpectralClassicalRFamily)):
                raise UsageError("coupling needs a classical family")
            rep = verify.check_classical_unitarity_and_residue(fam, spec)
            c = _residual_check("coupling_fit", rep.residual, tol, seed)
            c.detail.update(epsilon=rep.epsilon, delta=rep.delta)
            checks.append(c)
            if rep.unitarity is not None:
                checks.append(_residual_check("unitarity", rep.unitarity, tol, seed))
    except NumericalError as e:
        checks.append(_numerical_check(check, e, tol, seed))
    _emit(report(f"verify:{check}", checks, seed, family=fam.meta), o)
    return exit_code(checks)


def cmd_gauge(o):
    if o.get("chain") is None:
        raise UsageError("gauge needs --chain")
    desc = descriptor(o)
    new_chain = o["chain"]
    if desc is not None:
        desc["chain"] = None if desc.get("chain") == new_chain else desc.get("chain")
        fam = build_family(desc)
    else:
        fam, _ = load_input(o["input"])
    moves = parse_chain(new_chain, fam.N, fam)
    seed = int(o["seed"])
    tol = _tol(o, "gauge")
    spec = _spec(o)
    checks = []
    try:
        out = gauge.apply_chain(fam, moves)
        if isinstance(out, cons.SpectralRFamily):
            checks.append(_residual_check("qdyb", verify.check_qdyb_spectral(out, spec), tol, seed))
            checks.append(_residual_check("unitarity", verify.check_unitarity(out, spec), tol, seed))
        elif isinstance(out, cons.RFamily):
            checks.append(_residual_check("qdyb", verify.check_qdyb(out, spec), tol, seed))
            before = verify.check_hecke(fam, spec=spec)
            after = verify.check_hecke(out, spec=spec)
            c = _residual_check("hecke", after.residual, tol, seed)
            c.detail.update(p_before=before.p, q_before=before.q, p=after.p, q=after.q)
            checks.append(c)
        else:
            checks.append(_residual_check("cdyb", verify.check_cdyb(out, spec), DEFAULT_TOL["cdyb"], seed))
    except NumericalError as e:
        checks.append(_numerical_check("gauge", e, tol, seed))
    if desc is not None:
        # a descriptor of the gauged family, usable as --input
        prior = parse_json_arg(desc["chain"]) if desc.get("chain") else []
        desc["chain"] = list(prior if isinstance(prior, list) else [prior]) + [m.to_json() for m in moves]
    _emit(report("gauge", checks, seed, family=fam.meta, chain=[m.to_json() for m in moves], descriptor=desc), o)
    return exit_code(checks)


def cmd_classify(o):
    fam = _family(o)
    if not isinstance(fam, cons.RFamily):
        raise UsageError("classification needs a family without spectral parameter")
    try:
        cf = clf.classify(fam)
    except NumericalError as e:
        sys.stderr.write(f"classification failed: {e}\n")
        return 3
    doc = {"schema": REPORT_SCHEMA, "version": __version__, **cf.to_json()}
    _emit(doc, o)
    return 0


def _has_closed_form(fam) -> bool:
    """Full-interval trigonometric family with unit quasiconstants and step 1."""
    m = fam.meta
    if m.get("family") != "trig_hecke" or m.get("X") != [(0, fam.N - 1)] or complex(m.get("step", 1)) != 1:
        return False
    mu = m.get("mu")
    return mu is None or bool(np.allclose(mu.values[~np.eye(fam.N, dtype=bool)], 1))


def cmd_rigidity(o):
    fam = _family(o)
    if not isinstance(fam, cons.RFamily):
        raise UsageError("rigidity needs a family without spectral parameter")
    seed = int(o["seed"])
    tol = _tol(o, "rigidity")
    spec = _spec(o)
    lam = parse_vector(o["lambda"], fam.N) if o.get("lambda") is not None else spec.lam(spec.rng(0), fam.N)
    checks = []
    data = closed = None
    try:
        data = alg.compute_rigidity(fam, lam, oracle_tol=None)
        q_or, qp_or = alg.rigidity_oracle(fam, lam)
        dev = float(np.max(np.abs(np.diag(data.Q) - q_or)))
        if qp_or is not None and np.all(np.isfinite(np.diag(data.Qp))):
            dev = max(dev, float(np.max(np.abs(np.diag(data.Qp) - qp_or))))
        checks.append(suites.Check("contraction_vs_oracle", dev < tol, dev, tol, seed))
        checks.append(_residual_check("crossing", alg.check_crossing(fam, _spec(o, count=min(spec.count, 6))), DEFAULT_TOL["crossing"], seed))
        if _has_closed_form(fam):
            closed = alg.closed_form_Q_trig(lam, np.exp(complex(fam.meta["epsilon"])), fam.N)
            qp = np.diag(data.Qp)
            ok = np.isfinite(qp)
            dev = max(float(np.max(np.abs(np.diag(data.Q - closed.Q)))), float(np.max(np.abs(qp[ok] - np.diag(closed.Qp)[ok]), initial=0.0)))
            checks.append(suites.Check("closed_form", dev < tol, dev, tol, seed))
    except NumericalError as e:
        checks.append(_numerical_check("rigidity", e, tol, seed))
    extra = {"lambda": lam, "rigidity": data.to_json() if data else None}
    if closed is not None:
        extra["closed_form"] = closed.to_json()
    _emit(report("rigidity", checks, seed, family=fam.meta, **extra), o)
    return exit_code(checks)


def cmd_pbw(o):
    fam = _family(o)
    if not isinstance(fam, cons.RFamily):
        raise UsageError("PBW ranks need a family without spectral parameter")
    seed = int(o["seed"])
    deg = _int_at_least("degree", o["degree"], 2)
    trials = _int_at_least("trials", o["trials"], 3)
    checks = []
    try:
        rep = alg.pbw_rank_check(fam, deg, trials, _spec(o, radius=1.5), shift_sign=int(o["shift_sign"]))
        checks.append(suites.Check(f"pbw/degree={deg}", rep.passes, float(rep.quotient_dim - rep.expected_quotient), 0.5, seed, rep.to_json()))
    except NumericalError as e:
        checks.append(_numerical_check(f"pbw/degree={deg}", e, 0.5, seed))
    _emit(report("pbw", checks, seed, family=fam.meta), o)
    return exit_code(checks)


LIMIT_TOL = {"elliptic_to_trig": 1e-6, "trig_to_rational": 1e-4, "frt_extrapolation": 1e-6}


def cmd_limits(o):
    seed = int(o["seed"])
    kinds = [o["kind"]] if o.get("kind") else list(LIMIT_TOL)
    spec = _spec(o, count=5 if o.get("samples_given") is None else int(o["samples"]))
    checks = []
    for k in kinds:
        params = {}
        if o.get("N") is not None:
            params["N"] = _int_at_least("N", o["N"], 2 if k != "frt_extrapolation" else 1)
        if k == "frt_extrapolation" and o.get("sigma") is not None:
            params["sigma"] = parse_permutation(o["sigma"])
        tol = float(o["tol"]) if o.get("tol") is not None else LIMIT_TOL[k]
        params["tol"] = tol
        try:
            seq = verify.degeneration_check(k, params, spec, raise_on_fail=False)
            vals = [r.max_abs for r in seq]
            ok = vals[-1] < tol
            if k == "elliptic_to_trig":
                ok = ok and all(b < a for a, b in zip(vals, vals[1:]))
            checks.append(suites.Check(k, ok, vals[-1], tol, seed, {"sequence": vals}))
        except NumericalError as e:
            checks.append(_numerical_check(k, e, tol, seed))
    _emit(report("limits", checks, seed), o)
    return exit_code(checks)


def cmd_suite(o):
    name = o["name"]
    if name not in suites.SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(suites.SUITES)}")
    seed = int(o["seed"])
    results = suites.run_suite(name, seed)
    checks = []
    for r in results:
        for c in r.checks:
            c.criterion = r.number
            checks.append(c)
    for r in results:
        sys.stderr.write(r.summary_line() + "\n")
    crit = [{"number": r.number, "title": r.title, "pass": r.passed, "checks": len(r.checks)} for r in results]
    _emit(report(name, checks, seed, criteria=crit), o)
    return exit_code(checks)


def cmd_export(o):
    fam = _family(o)
    if isinstance(fam, (cons.ClassicalRFamily, cons.SpectralClassicalRFamily)):
        raise UsageError("export handles quantum families")
    spec = _spec(o)
    spectral = isinstance(fam, cons.SpectralRFamily)
    pts = []
    if o.get("lambda") is not None:
        lams = parse_json_arg(o["lambda"])
        if not isinstance(lams, list) or not all(isinstance(x, list) for x in lams):
            raise UsageError("--lambda for export is a JSON list of points, each a list of N coordinates")
        for lam in lams:
            pt = {"lambda": parse_vector(lam, fam.N)}
            if spectral:
                pt["z"] = parse_complex(o["z"]) if o.get("z") is not None else spec.z(spec.rng(1))[0]
            pts.append(pt)
    elif not o.get("classify_points"):
        for k in range(spec.count):
            rng = spec.rng(k)
            pt = {"lambda": spec.lam(rng, fam.N)}
            if spectral:
                pt["z"] = spec.z(rng)[0]
            pts.append(pt)
    try:
        if o.get("classify_points"):
            if spectral:
                raise UsageError("--classify-points needs a family without spectral parameter")
            rec = mf.RecordingFamily(fam)
            clf.classify(rec.family)
            # requested points first, then everything the classifier evaluated
            doc = mf.export_family(fam, pts + rec.points())
        else:
            doc = mf.export_family(fam, pts)
    except NumericalError as e:
        sys.stderr.write(f"export failed: {e}\n")
        return 3
    _emit(doc, o)
    return 0


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "gauge": cmd_gauge,
    "classify": cmd_classify,
    "rigidity": cmd_rigidity,
    "pbw": cmd_pbw,
    "limits": cmd_limits,
    "suite": cmd_suite,
    "export": cmd_export,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def _common(p):
    g = p.add_argument_group("sampling and output")
    g.add_argument("--config", help="JSON file supplying defaults for any flag")
    g.add_argument("--seed", type=int, help=f"sample seed (default ${SEED_ENV} or 0)")
    g.add_argument("--samples", type=int, help="number of sample points")
    g.add_argument("--radius", type=float, help="radius of the lambda sampling disc")
    g.add_argument("--z-radius", type=float, help="radius of the z sampling disc")
    g.add_argument("--z-center", help="center of the z sampling disc")
    g.add_argument("--tol", type=float, help="tolerance override")
    g.add_argument("--out", help="write the JSON result here instead of stdout")
    f = p.add_argument_group("family")
    f.add_argument("--input", help="family descriptor or matrix file (JSON)")
    f.add_argument("--family", help=f"one of: {', '.join(FAMILIES)}")
    f.add_argument("--N", help="dimension of V")
    f.add_argument("--X", help="interval decomposition as 1-based dash ranges, e.g. 1-3,5 (default: all of 1..N; 'none' for empty)")
    f.add_argument("--q", help="Hecke parameter q (trigonometric families use the principal log)")
    f.add_argument("--epsilon", help="log q, overrides --q")
    f.add_argument("--mu", help="quasiconstants: JSON list of N potential values, {\"table\": ...}, or a file")
    f.add_argument("--step", help="lambda step of the Hecke families")
    f.add_argument("--gamma", help="gamma of spectral families")
    f.add_argument("--sigma", help="1-based permutation, comma separated (frt)")
    f.add_argument("--tau", help="elliptic modulus, e.g. 2j")
    f.add_argument("--chain", help="gauge chain: JSON list of moves, or a file")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dynrmat", description="Dynamical R-matrices of Hecke type: construction, checks and classification.")
    p.add_argument("--version", action="version", version=f"dynrmat {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("construct", help="evaluate a family at one point")
    _common(c)
    c.add_argument("--lambda", dest="lambda", help="JSON list of lambda coordinates")
    c.add_argument("--z", help="spectral parameter")
    c = sub.add_parser("verify", help="run one property check")
    c.add_argument("check", choices=VERIFY_CHECKS)
    _common(c)
    c = sub.add_parser("gauge", help="apply a gauge chain and re-verify")
    _common(c)
    c = sub.add_parser("classify", help="recover the canonical form of a Hecke family")
    _common(c)
    c = sub.add_parser("rigidity", help="Q and Q' at a point, with oracle and crossing checks")
    _common(c)
    c.add_argument("--lambda", dest="lambda", help="JSON list of lambda coordinates")
    c = sub.add_parser("pbw", help="numerical PBW rank check")
    _common(c)
    c.add_argument("--degree", type=int)
    c.add_argument("--trials", type=int)
    c.add_argument("--shift-sign", type=int, choices=(-1, 1), help="sign of the moment-map shift in degree 3 (default -1)")
    c = sub.add_parser("limits", help="degeneration limits")
    _common(c)
    c.add_argument("--kind", choices=tuple(LIMIT_TOL))
    c = sub.add_parser("suite", help="run an acceptance suite")
    c.add_argument("name", help=f"one of: {', '.join(suites.SUITES)}")
    _common(c)
    c = sub.add_parser("export", help="sample a family into a matrix file")
    _common(c)
    c.add_argument("--lambda", dest="lambda", help="JSON list of points (each a list of coordinates)")
    c.add_argument("--z", help="spectral parameter for the given points")
    c.add_argument("--classify-points", action="store_true", help="also store every point the classifier evaluates")
    return p


def _options(ns) -> dict:
    o = {k: v for k, v in vars(ns).items()}
    if o.get("config"):
        cfg = parse_json_arg(o["config"])
        if not isinstance(cfg, dict):
            raise UsageError("the config file must hold a JSON object")
        for k, v in cfg.items():
            k = k.replace("-", "_")
            if o.get(k) is None:
                o[k] = v
    o["samples_given"] = o.get("samples")
    for k, v in DEFAULTS.items():
        if o.get(k) is None:
            o[k] = v
    if o.get("seed") is None:
        env = os.environ.get(SEED_ENV)
        try:
            o["seed"] = int(env) if env not in (None, "") else 0
        except ValueError:
            raise UsageError(f"${SEED_ENV} must be an integer") from None
    if o.get("N") is not None:
        _int_at_least("N", o["N"], 1)
    return o


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        o = _options(ns)
        return COMMANDS[ns.command](o)
    except (InputError, ValueError, OSError) as e:
        sys.stderr.write(f"dynrmat: error: {e}\n")
        return 2
    except NumericalError as e:
        sys.stderr.write(f"dynrmat: numerical failure: {e}\n")
        return 3
    except DynRMatError as e:
        sys.stderr.write(f"dynrmat: {e}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
