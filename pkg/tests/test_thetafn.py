import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynrmat.errors import NonConvergent, PoleAtArgument
from dynrmat.thetafn import EllipticParams, rho, sigma_w, theta, theta_prime

P = EllipticParams(1.3j + 0.2)
points = st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False)


def test_theta_vanishes_at_origin():
    assert abs(theta(0.0, P)) < 1e-14
    assert abs(theta_prime(0.0, P)) > 0.1


@settings(max_examples=40, deadline=None)
@given(points)
def test_theta_is_odd_and_derivative_even(z):
    assert abs(theta(-z, P) + theta(z, P)) < 1e-12
    assert abs(theta_prime(-z, P) - theta_prime(z, P)) < 1e-11


@pytest.mark.parametrize("z", [0.1, 0.3 + 0.2j, -0.45 + 0.1j])
def test_derivative_matches_central_difference(z):
    h = 1e-4
    fd = (theta(z + h, P) - theta(z - h, P)) / (2 * h)
    # h^2 truncation; Richardson removes it
    fd2 = (theta(z + h / 2, P) - theta(z - h / 2, P)) / h
    assert abs((4 * fd2 - fd) / 3 - theta_prime(z, P)) < 1e-8


@pytest.mark.parametrize("z", [0.17, 0.2 - 0.3j])
def test_quasi_periodicity(z):
    tau = P.tau
    assert abs(theta(z + 1, P) + theta(z, P)) < 1e-12
    expected = -np.exp(-1j * np.pi * tau - 2j * np.pi * z) * theta(z, P)
    assert abs(theta(z + tau, P) - expected) < 1e-11


def test_sigma_residue_at_zero_is_plus_one():
    w = 0.31 + 0.07j
    vals = [z * sigma_w(z, w, P) for z in (1e-3, 1e-4, 1e-5)]
    assert abs(vals[-1] - 1) < 1e-4
    assert abs(vals[-1] - 1) < abs(vals[0] - 1)


def test_sigma_symmetry(rng):
    # theta(w - z) / theta(z) theta(w) swaps sign under (z, w) -> (-z, -w)
    z, w = 0.21 + 0.1j, -0.33 + 0.05j
    assert abs(sigma_w(-z, -w, P) + sigma_w(z, w, P)) < 1e-11


@settings(max_examples=30, deadline=None)
@given(points.filter(lambda z: abs(z) > 1e-2))
def test_rho_is_odd(z):
    assert abs(rho(-z, P) + rho(z, P)) < 1e-9 * max(1, abs(rho(z, P)))


def test_poles_raise():
    with pytest.raises(PoleAtArgument):
        sigma_w(0.0, 0.0, P)
    with pytest.raises(PoleAtArgument):
        rho(0.0, P)


def test_tau_must_be_in_upper_half_plane():
    with pytest.raises(ValueError):
        EllipticParams(-1j)


def test_series_budget_is_enforced():
    with pytest.raises(NonConvergent):
        theta(40j, EllipticParams(0.05j, max_terms=5))
