#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import numpy as np
import pytest

import kgman
import kgman.errors


@pytest.mark.parametrize("m,p", [(0.5, 1), (0.3, 1), (0.5, 2), (0.8, 3)])
def test_amplitude(m, p):
    params = kgman.ModelParams(m=m, p=p)
    expected = m ** (1.0 / p) * (p + 1) ** (1.0 / (2 * p))
    assert abs(kgman.alpha(0.0, params) - expected) < 1e-15
    assert kgman.beta(0.0, params) == 0.0


@pytest.mark.parametrize("m,p", [(0.5, 1), (0.5, 2), (0.8, 3)])
def test_planar_energy_vanishes(m, p):
    params = kgman.ModelParams(m=m, p=p)
    t = np.linspace(-20.0 / m, 20.0 / m, 1000)
    level = kgman.planar_energy(kgman.alpha(t, params), kgman.beta(t, params), params)
    assert np.max(np.abs(level)) < 1e-12


def test_closed_form_derivatives(params):
    t = np.linspace(-10.0, 10.0, 201)
    h = 1e-5
    da = (kgman.alpha(t + h, params) - kgman.alpha(t - h, params)) / (2 * h)
    db = (kgman.beta(t + h, params) - kgman.beta(t - h, params)) / (2 * h)
    assert np.max(np.abs(da - kgman.beta(t, params))) < 1e-9
    assert np.max(np.abs(db - kgman.alpha_ddot(t, params))) < 1e-9


@pytest.mark.parametrize("m,p", [(0.5, 1), (0.5, 2), (0.8, 3)])
def test_tail_and_turning_point(m, p):
    params = kgman.ModelParams(m=m, p=p)
    orbit = kgman.HomoclinicOrbit(params)
    A = orbit.amplitude
    a10 = float(kgman.alpha(10.0, params))
    assert a10 == pytest.approx(A * np.cosh(p * m * 10.0) ** (-1.0 / p), rel=1e-13)
    tail = 2.0 ** (1.0 / p) * A * np.exp(-m * 10.0)
    rel = (tail - a10) / tail
    assert 0.0 < rel <= 2.0 * np.exp(-2.0 * p * m * 10.0) / p
    assert kgman.alpha_ddot(0.0, params) == pytest.approx(
        -p * m ** 2 * A, rel=1e-13
    )


def test_no_overflow_far_out(params):
    t = np.array([-1e4, 1e4])
    a = kgman.alpha(t, params)
    assert np.all(np.isfinite(a)) and np.all(a == 0.0)
    assert np.all(np.isfinite(kgman.beta(t, params)))


def test_reversibility(params):
    for t in [0.5, 3.0, 17.0]:
        X = kgman.homoclinic_state(t, params)
        assert kgman.apply_symmetry(kgman.homoclinic_state(-t, params)).allclose(
            X, atol=1e-15
        )


def test_equilibria(params):
    assert kgman.equilibria(params) == [0.0, 0.5, -0.5]
    for sign in (1, -1):
        X = kgman.equilibrium_state(sign, params)
        assert abs(kgman.energy(X, params) + 0.015625) < 1e-14
        assert np.max(np.abs(kgman.nonlinear_force(X.a, params)[1:])) < 1e-15


@pytest.mark.parametrize("p", [1, 2, 3])
def test_equilibrium_energy_floor(p):
    params = kgman.ModelParams(m=0.5, p=p)
    a = params.m ** (1.0 / p)
    expected = -p / (2.0 * (p + 1)) * params.m ** (2.0 + 2.0 / p)
    assert kgman.planar_energy(a, 0.0, params) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("order,T", [(2, 10.0), (4, 20.0)])
def test_planar_orbit_tracks_homoclinic(params, order, T):
    orbit = kgman.planar_orbit(
        kgman.HomoclinicOrbit(params).amplitude, params, T=T, dt=1e-3, order=order
    )
    err = np.abs(orbit.a0 - kgman.alpha(orbit.times, params))
    assert err.max() < 1e-5
    assert orbit.drift < 1e-6


@pytest.mark.parametrize("fraction", [0.4, 0.85, 1.15])
def test_level_orbits_close(params, fraction):
    eta = fraction * kgman.HomoclinicOrbit(params).amplitude
    t_ret, a_ret = kgman.planar_first_return(eta, params, dt=1e-4)
    assert np.isfinite(t_ret) and t_ret > 0
    assert abs(a_ret - eta) < 1e-6


def test_equilibrium_is_fixed(params):
    t_ret, a_ret = kgman.planar_first_return(0.5, params)
    assert (t_ret, a_ret) == (0.0, 0.5)


@pytest.mark.parametrize("p,order", [(1, 2), (1, 4), (2, 2)])
def test_planar_orbit_rests_at_equilibrium(p, order):
    params = kgman.ModelParams(m=0.5, p=p)
    eta = params.m ** (1.0 / p)
    orbit = kgman.planar_orbit(eta, params, T=20.0, dt=1e-3, order=order)
    # the splitting moves the fixed point by O(dt²)
    assert np.max(np.abs(orbit.a0 - eta)) < 1e-6
    assert np.max(np.abs(orbit.b0)) < 1e-6


def test_planar_drift_error(params):
    with pytest.raises(kgman.errors.EnergyDriftError):
        kgman.planar_orbit(1.2, params, T=50.0, dt=0.5, drift_tolerance=1e-12)
