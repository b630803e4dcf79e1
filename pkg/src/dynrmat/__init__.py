"""Numerical toolkit for gl_N dynamical R-matrices of Hecke type.

Submodules: :mod:`tensorspace`, :mod:`thetafn`, :mod:`constructors`,
:mod:`verify`, :mod:`gauge`, :mod:`classify`, :mod:`algebroid`,
:mod:`suites` and the command-line front end :mod:`cli`.
"""

from . import algebroid, classify, constructors, errors, gauge, suites, tensorspace, thetafn, verify
from .constructors import (
    IntervalDecomposition,
    QuasiconstantTable,
    decompose,
    frt_constant_R,
    identity_family,
    rational_hecke_R,
    spectral_elliptic_R,
    spectral_rational_R,
    spectral_trig_R,
    trig_hecke_R,
)
from .verify import SampleSpec

__version__ = "0.1.0"

__all__ = [
    "algebroid",
    "classify",
    "constructors",
    "errors",
    "gauge",
    "suites",
    "tensorspace",
    "thetafn",
    "verify",
    "IntervalDecomposition",
    "QuasiconstantTable",
    "decompose",
    "frt_constant_R",
    "identity_family",
    "rational_hecke_R",
    "spectral_elliptic_R",
    "spectral_rational_R",
    "spectral_trig_R",
    "trig_hecke_R",
    "SampleSpec",
    "__version__",
]
