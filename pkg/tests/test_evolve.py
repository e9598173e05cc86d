#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import os.path as osp

import numpy as np
import pytest

import kgman
import kgman.errors


@pytest.mark.parametrize(
    "kwargs", [dict(order=3), dict(dt=0.0), dict(dt=-1e-3), dict(drift_tolerance=0)]
)
def test_scheme_config_validation(kwargs):
    with pytest.raises(ValueError):
        kgman.SchemeConfig(**kwargs)


def test_composition_weights(params):
    assert np.sum(kgman.composition_weights(4)) == pytest.approx(1.0, abs=1e-15)
    assert np.sum(kgman.composition_weights(4) ** 3) == pytest.approx(0.0, abs=1e-15)
    assert kgman.composition_weights(2) is kgman.STRANG
    with pytest.raises(ValueError):
        kgman.composition_weights(3)
    stepper = kgman.Stepper(params, kgman.SchemeConfig(order=4))
    assert stepper._weights is kgman.TRIPLE_JUMP


def test_linear_coefficients_symplectic(params, spectrum):
    taus = np.array([-3.0, 0.1, 2.5, 10.0])
    c11, c12, c21, c22 = kgman.linear_coefficients(spectrum.lam, params.m, taus)
    assert c11.shape == (4, spectrum.dim)
    assert np.allclose(c11 * c22 - c12 * c21, 1.0, atol=1e-11)
    assert np.allclose(c11[:, 0], np.cosh(params.m * taus), rtol=1e-14)


def test_zero_kick_is_linear_flow(params, spectrum, rng):
    X0 = kgman.random_state(spectrum, amplitude=0.3, rng=rng)
    scheme = kgman.SchemeConfig(dt=0.05)
    traj = kgman.integrate(
        X0, 3.0, params, scheme, force=lambda a, b, t: np.zeros_like(a)
    )
    assert traj.state(-1).allclose(kgman.linear_flow(X0, 3.0, params), atol=1e-12)


@pytest.mark.parametrize("order", [2, 4])
def test_reverse_step_undoes_step(params, spectrum, rng, order):
    scheme = kgman.SchemeConfig(order=order, dt=0.01)
    for _ in range(5):
        X = kgman.random_state(spectrum, amplitude=0.3, rng=rng)
        Y = kgman.step(X, params, scheme)
        assert not Y.allclose(X, atol=1e-6)
        back = kgman.step(Y, params, scheme, t=scheme.dt, reverse=True)
        assert back.allclose(X, atol=1e-12)


@pytest.mark.parametrize("order,T", [(2, 10.0), (4, 20.0)])
def test_tracks_homoclinic(params, order, T):
    scheme = kgman.SchemeConfig(order=order, dt=1e-3)
    traj = kgman.integrate(
        kgman.homoclinic_state(0.0, params), T, params, scheme, sample_every=100
    )
    err = np.abs(traj.A[:, 0] - kgman.alpha(traj.times, params))
    assert err.max() < 1e-5
    assert np.max(traj.observables["norm_c"]) < 1e-12
    assert kgman.apriori_bound_report(traj, params).holds


@pytest.mark.parametrize("order,slope", [(2, 2.0), (4, 4.0)])
def test_convergence_order(small_params, order, slope):
    X0 = kgman.homoclinic_state(0.0, small_params) + kgman.State.single_mode(
        kgman.spectrum_for(small_params).dim, 1, a=0.05, b=0.02
    )
    reference = kgman.integrate(
        X0, 2.0, small_params, kgman.SchemeConfig(order=4, dt=1e-3)
    ).state(-1)

    dts = np.array([0.04, 0.02, 0.01])
    errors = []
    for dt in dts:
        scheme = kgman.SchemeConfig(order=order, dt=dt, drift_tolerance=1e-2)
        final = kgman.integrate(X0, 2.0, small_params, scheme).state(-1)
        diff = final - reference
        errors.append(max(np.max(np.abs(diff.a)), np.max(np.abs(diff.b))))
    fitted = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    assert fitted == pytest.approx(slope, abs=0.075 * slope)


@pytest.mark.slow
def test_energy_conservation_order4(rng):
    params = kgman.ModelParams(m=0.5, p=1, N=32)
    X0 = kgman.project_c(
        kgman.random_state(kgman.spectrum_for(params), amplitude=0.1, rng=rng)
    )
    scheme = kgman.SchemeConfig(order=4, dt=1e-3)
    traj = kgman.integrate(X0, 50.0, params, scheme, sample_every=500)
    assert traj.H0 > 0
    H = traj.observables["H"]
    assert np.max(np.abs(H - traj.H0)) / traj.H0 < 1e-10


def test_forward_backward_round_trip(params):
    scheme = kgman.SchemeConfig(order=2, dt=1e-3)
    X0 = kgman.homoclinic_state(0.0, params)
    forward = kgman.integrate(X0, 10.0, params, scheme, sample_every=1000)
    back = kgman.integrate_backward(
        forward.state(-1), 10.0, params, scheme, method="direct", sample_every=1000
    )
    assert back.times[0] == pytest.approx(-10.0)
    assert back.state(0).allclose(X0, atol=1e-9)


def test_backward_methods_agree(params):
    scheme = kgman.SchemeConfig(order=4, dt=1e-3)
    X0 = kgman.homoclinic_state(2.0, params)
    direct = kgman.integrate_backward(X0, 4.0, params, scheme, method="direct")
    conj = kgman.integrate_backward(X0, 4.0, params, scheme, method="conjugate")
    assert np.allclose(direct.times, conj.times)
    assert np.max(np.abs(direct.A - conj.A)) < 1e-10
    # the homoclinic is reversible: X(-2) = S X(2)
    assert direct.state(0).allclose(kgman.homoclinic_state(-2.0, params), atol=1e-8)
    with pytest.raises(ValueError):
        kgman.integrate_backward(X0, 1.0, params, scheme, method="reverse")


def test_apriori_bound_on_homoclinic(params):
    traj = kgman.integrate(
        kgman.homoclinic_state(-5.0, params), 10.0, params, kgman.SchemeConfig()
    )
    report = kgman.apriori_bound_report(traj, params)
    assert report.bound == pytest.approx(0.03125, abs=1e-10)
    assert report.holds
    # the bound is attained where α = m
    assert report.max_ratio == pytest.approx(1.0, abs=1e-6)
    assert abs(abs(report.worst_time) - np.arcsinh(1.0) / params.m) < 0.01


def test_energy_drift_error(params):
    scheme = kgman.SchemeConfig(dt=0.5, drift_tolerance=1e-12)
    X0 = kgman.homoclinic_state(0.0, params) + kgman.State.single_mode(
        kgman.spectrum_for(params).dim, 1, a=0.1
    )
    with pytest.raises(kgman.errors.EnergyDriftError):
        kgman.integrate(X0, 20.0, params, scheme)


def test_drift_measured_against_orbit_scale(params):
    # starts next to the origin where the quadratic energy is ~1e-6
    X0 = kgman.homoclinic_state(-12.0, params)
    traj = kgman.integrate(X0, 24.0, params, kgman.SchemeConfig(), sample_every=100)
    assert abs(traj.H0) < 1e-8
    back = kgman.integrate_backward(
        traj.state(-1), 24.0, params, kgman.SchemeConfig(), method="direct"
    )
    assert back.state(0).allclose(X0, atol=1e-8)


def test_zero_duration(params):
    X0 = kgman.homoclinic_state(0.0, params)
    with pytest.raises(ValueError):
        kgman.integrate(X0, 0.0, params, kgman.SchemeConfig())


def test_stop_condition(params):
    traj = kgman.integrate(
        kgman.homoclinic_state(0.0, params),
        10.0,
        params,
        kgman.SchemeConfig(),
        stop=lambda t, a, b: t >= 1.0,
    )
    assert traj.times[-1] == pytest.approx(1.0)


def test_trajectory_files(params, tmp_path):
    traj = kgman.integrate(
        kgman.homoclinic_state(0.0, params),
        1.0,
        params,
        kgman.SchemeConfig(),
        sample_every=100,
    )
    bin_path = osp.join(str(tmp_path), "traj.bin")
    kgman.write_trajectory_binary(traj, bin_path)
    assert osp.getsize(bin_path) == 16 + 8 * len(traj) * (1 + 2 * 17)
    back = kgman.read_trajectory_binary(bin_path, params)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.A, traj.A) and np.array_equal(back.B, traj.B)
    with pytest.raises(ValueError):
        kgman.read_trajectory_binary(bin_path, kgman.ModelParams(N=4))

    csv_path = osp.join(str(tmp_path), "traj.csv")
    kgman.write_trajectory_csv(traj, csv_path)
    with open(csv_path) as f:
        lines = f.read().splitlines()
    assert lines[0] == "t,a0,b0,H,J,norm_c"
    assert len(lines) == len(traj) + 1
    assert float(lines[-1].split(",")[0]) == pytest.approx(1.0)


def test_torus_energy_conservation(torus_params, rng):
    spectrum = kgman.spectrum_for(torus_params)
    X0 = kgman.project_c(kgman.random_state(spectrum, amplitude=0.2, rng=rng))
    scheme = kgman.SchemeConfig(order=4, dt=1e-2)
    traj = kgman.integrate(X0, 10.0, torus_params, scheme)
    H = traj.observables["H"]
    assert traj.A.shape[1] == 13
    assert np.max(np.abs(H - traj.H0)) / traj.H0 < 1e-7
