"""JSON exchange format for sampled R-matrix families.

A matrix file stores dense values of a family at explicit points::

    {"schema": 1, "N": 2, "legs": 2, "gamma": [1.0, 0.0],
     "points": [{"lambda": [[re, im], ...], "z": [re, im], "matrix": [[re, im], ...]}]}

``matrix`` is the row-major flattening of the ``N^legs x N^legs`` operator
and ``z`` is present for spectral families only. Floats are written with
their shortest round-trip representation, so reading back is bit-exact.
Re-imported files become tabulated families that answer only at the stored
points.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

from . import constructors as cons
from .errors import EvaluationPole, InputError

__all__ = [
    "SCHEMA",
    "encode_complex",
    "decode_complex",
    "RecordingFamily",
    "export_family",
    "load_matrix_file",
    "read_matrix_file",
    "dump",
]

SCHEMA = 1


class PointNotTabulated(EvaluationPole):
    """A tabulated family was asked for a point it does not store."""


def encode_complex(x):
    x = complex(x)
    return [float(x.real), float(x.imag)]


def decode_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"expected a complex number as [re, im], got {v!r}")


def _key(lam, z=None):
    lam = tuple(complex(x) for x in np.asarray(lam, dtype=complex))
    return lam if z is None else (complex(z),) + lam


class RecordingFamily:
    """Wrap a family and remember every point it is evaluated at.

    ``family`` is an evaluatable copy whose evaluations are logged in
    ``records`` (key to dense matrix), in first-use order.
    """

    def __init__(self, fam):
        self.inner = fam
        self.spectral = isinstance(fam, cons.SpectralRFamily)
        self.records: dict = {}
        if self.spectral:

            def ev(z, lam):
                D = fam.dense(z, lam)
                self.records.setdefault(_key(lam, z), D)
                return D

            self.family = cons.SpectralRFamily(fam.N, fam.gamma, ev, dict(fam.meta), dense_output=True)
        else:

            def ev(lam):
                D = fam.dense(lam)
                self.records.setdefault(_key(lam), D)
                return D

            self.family = cons.RFamily(fam.N, fam.gamma, ev, dict(fam.meta), dense_output=True)

    def points(self) -> list:
        out = []
        for k, D in self.records.items():
            if self.spectral:
                out.append({"z": k[0], "lambda": np.array(k[1:]), "matrix": D})
            else:
                out.append({"lambda": np.array(k), "matrix": D})
        return out


def export_family(fam, points: Iterable[dict]) -> dict:
    """Sample ``fam`` at ``points`` (dicts with ``lambda`` and optional ``z``)."""
    spectral = isinstance(fam, cons.SpectralRFamily)
    out = []
    for pt in points:
        lam = np.asarray(pt["lambda"], dtype=complex)
        if "matrix" in pt:
            D = np.asarray(pt["matrix"], dtype=complex)
        elif spectral:
            D = fam.dense(pt["z"], lam)
        else:
            D = fam.dense(lam)
        rec = {"lambda": [encode_complex(x) for x in lam]}
        if spectral:
            rec["z"] = encode_complex(pt["z"])
        rec["matrix"] = [encode_complex(x) for x in np.asarray(D).ravel()]
        out.append(rec)
    return {"schema": SCHEMA, "N": int(fam.N), "legs": 2, "gamma": encode_complex(fam.gamma), "points": out}


def read_matrix_file(doc: dict):
    """Tabulated family from a parsed matrix file; raises :class:`InputError` if malformed."""
    if not isinstance(doc, dict):
        raise InputError("a matrix file must be a JSON object")
    for k in ("N", "legs", "gamma", "points"):
        if k not in doc:
            raise InputError(f"matrix file lacks {k!r}")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"unsupported schema {doc.get('schema')!r}")
    N, legs = doc["N"], doc["legs"]
    if not isinstance(N, int) or N < 1:
        raise InputError("N must be a positive integer")
    if legs != 2:
        raise InputError("only two-leg operators can be imported as families")
    gamma = decode_complex(doc["gamma"])
    pts = doc["points"]
    if not isinstance(pts, list) or not pts:
        raise InputError("matrix file has no points")
    spectral = "z" in pts[0]
    dim = N**legs
    table = {}
    for i, pt in enumerate(pts):
        if ("z" in pt) != spectral:
            raise InputError("points must all carry z or all omit it")
        lam = [decode_complex(x) for x in pt.get("lambda", [])]
        if len(lam) != N:
            raise InputError(f"point {i}: lambda needs {N} entries")
        flat = pt.get("matrix", [])
        if len(flat) != dim * dim:
            raise InputError(f"point {i}: matrix needs {dim * dim} entries, got {len(flat)}")
        D = np.array([decode_complex(x) for x in flat], dtype=complex).reshape(dim, dim)
        table[_key(lam, decode_complex(pt["z"]) if spectral else None)] = D
    meta = {"family": "tabulated", "points": len(table)}
    if spectral:

        def ev(z, lam):
            k = _key(lam, z)
            if k not in table:
                raise PointNotTabulated({"z": z, "lambda": list(k[1:])}, "point not in the matrix file")
            return table[k]

        return cons.SpectralRFamily(N, gamma, ev, meta, dense_output=True)

    def ev(lam):
        k = _key(lam)
        if k not in table:
            raise PointNotTabulated(list(k), "point not in the matrix file")
        return table[k]

    return cons.RFamily(N, gamma, ev, meta, dense_output=True)


def load_matrix_file(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON ({e})") from e
    return read_matrix_file(doc)


def dump(doc, fh=None, **kw) -> str:
    s = json.dumps(doc, **kw)
    if fh is not None:
        fh.write(s + "\n")
    return s
