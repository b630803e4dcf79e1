"""Jacobi's first theta function and the elliptic kernels built from it.

The series is

.. math:: \\theta(z, \\tau) = -\\sum_{j \\in \\mathbb{Z} + 1/2}
          e^{\\pi i j^2 \\tau + 2 \\pi i j (z + 1/2)}

summed symmetrically over ``j = +-1/2, +-3/2, ...``. Arguments are not
reduced to a fundamental domain, so keep ``|Im z|`` moderate relative to
``Im tau``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent, PoleAtArgument

__all__ = ["EllipticParams", "theta", "theta_prime", "sigma_w", "rho"]


@dataclass(frozen=True)
class EllipticParams:
    tau: complex
    series_tol: float = 1e-15
    max_terms: int = 200

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise ValueError(f"tau must lie in the upper half plane, got {tau}")
        object.__setattr__(self, "tau", tau)

    @property
    def nome(self) -> complex:
        """``q = exp(2 pi i tau)``."""
        return np.exp(2j * np.pi * self.tau)


def _n_terms(z, p: EllipticParams) -> int:
    # |term_j| <= exp(-pi j^2 Im tau + 2 pi |j| |Im z|); stop once the first
    # omitted term is below tol relative to the largest term.
    t = p.tau.imag
    y = abs(complex(z).imag)
    jmax = y / t
    log_peak = -np.pi * jmax**2 * t + 2 * np.pi * jmax * y
    log_tol = np.log(p.series_tol)
    for M in range(1, p.max_terms + 1):
        j = M + 0.5
        if j <= jmax:
            continue
        if -np.pi * j**2 * t + 2 * np.pi * j * y - log_peak < log_tol:
            return M
    raise NonConvergent(f"theta series needs more than {p.max_terms} terms at z={z}, tau={p.tau}")


def _js(z, p):
    M = _n_terms(z, p)
    return np.arange(-M, M) + 0.5


def theta(z, p: EllipticParams) -> complex:
    z = complex(z)
    j = _js(z, p)
    terms = np.exp(1j * np.pi * j**2 * p.tau + 2j * np.pi * j * (z + 0.5))
    M = len(j) // 2
    # pair j with -j, smallest terms first
    pairs = terms[M:] + terms[:M][::-1]
    return complex(-np.sum(pairs[::-1]))


def theta_prime(z, p: EllipticParams) -> complex:
    """Derivative of :func:`theta` in ``z`` (termwise)."""
    z = complex(z)
    j = _js(z, p)
    terms = 2j * np.pi * j * np.exp(1j * np.pi * j**2 * p.tau + 2j * np.pi * j * (z + 0.5))
    return complex(-np.sum(terms))


def _vanishes(t, p) -> bool:
    # lattice points come out at rounding level, not exactly zero
    return abs(t) <= 1e-15 * max(1.0, abs(theta_prime(0.0, p)))


def sigma_w(z, w, p: EllipticParams) -> complex:
    """``theta(w - z) theta'(0) / (theta(w) theta(z))``."""
    tw, tz = theta(w, p), theta(z, p)
    if _vanishes(tw, p) or _vanishes(tz, p):
        raise PoleAtArgument(f"sigma_w has a pole at z={z}, w={w}")
    return theta(w - z, p) * theta_prime(0.0, p) / (tw * tz)


def rho(z, p: EllipticParams) -> complex:
    """Logarithmic derivative ``theta'(z) / theta(z)``."""
    tz = theta(z, p)
    if _vanishes(tz, p):
        raise PoleAtArgument(f"rho has a pole at z={z}")
    return theta_prime(z, p) / tz
