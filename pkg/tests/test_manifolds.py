#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import math

import attr
import numpy as np
import pytest

import kgman
import kgman.errors
from kgman.manifolds.center_stable import _classify, solver_context


def _mode_datum(params, entry, norm, momentum=0.0):
    spectrum = kgman.spectrum_for(params)
    X = kgman.State.single_mode(spectrum.dim, entry, a=1.0, b=momentum)
    return (norm / kgman.state_norm(X, spectrum)) * X


def test_cutoff_theta():
    delta = 1e-3
    s = np.array([0.0, delta, 1.5 * delta, 2 * delta, 3 * delta])
    assert np.allclose(kgman.cutoff_theta(s, delta), [1.0, 1.0, 0.5, 0.0, 0.0])
    values = kgman.cutoff_theta(np.linspace(0, 3 * delta, 301), delta)
    assert np.all(np.diff(values) <= 0)
    with pytest.raises(ValueError):
        kgman.cutoff_theta(0.0, 0.0)


def test_truncation_build(params, trunc):
    assert trunc.delta == pytest.approx(0.1 ** 1.5, rel=1e-15)
    assert trunc.r == 0.25
    assert trunc.t_eps == pytest.approx(8.0 * math.log(10.0))
    assert trunc.T_horizon == pytest.approx(80.0)
    assert trunc.center_radius == trunc.delta
    assert trunc.steps == 8000

    long_window = kgman.TruncationConfig.build(params, 1e-6)
    assert long_window.T_horizon == pytest.approx(2 * long_window.t_eps)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(epsilon=1.5),
        dict(epsilon=0.1, r=0.6),
        dict(epsilon=0.1, r=-0.1),
        dict(epsilon=0.1, fp_tol=0.0),
        dict(epsilon=0.1, max_iter=0),
        dict(epsilon=0.1, center_radius=-1.0),
    ],
)
def test_truncation_validation(params, kwargs):
    with pytest.raises(ValueError):
        kgman.TruncationConfig.build(params, **kwargs)


def test_truncation_relations(params, trunc):
    with pytest.raises(ValueError):
        attr.evolve(trunc, delta=2 * trunc.delta)
    with pytest.raises(ValueError):
        attr.evolve(trunc, t_eps=1.0).validate(params)


def test_remainder_is_quadratic(params, trunc, spectrum):
    alpha0 = float(kgman.alpha(0.0, params))
    a = np.zeros(spectrum.dim)
    a[0] = 0.3
    a[1] = 1.0
    b = np.zeros(spectrum.dim)
    sizes = [
        np.max(np.abs(kgman.remainder_force(s * a, b, alpha0, params, trunc, False)))
        for s in (1e-4, 2e-4)
    ]
    assert sizes[1] / sizes[0] == pytest.approx(4.0, rel=1e-3)


def test_deviation_force_without_cutoff(params, trunc, spectrum, rng):
    force = kgman.z_force(params, trunc, cutoff=False)
    Z = kgman.random_state(spectrum, amplitude=0.05, rng=rng)
    for t in (0.0, 1.5, -4.0):
        h = kgman.homoclinic_state(t, params)
        expected = kgman.nonlinear_force(Z.a + h.a, params) - kgman.nonlinear_force(
            h.a, params
        )
        assert np.allclose(force(Z.a, Z.b, t), expected, atol=1e-14)


def test_cutoff_switches_remainder_off(params, trunc):
    Z = _mode_datum(params, 1, 3 * trunc.delta)
    N = kgman.truncated_N(Z, kgman.homoclinic_state(0.0, params), params, trunc)
    assert np.all(N.a == 0.0) and np.all(N.b == 0.0)
    F = kgman.truncated_F_force(Z.a, Z.b, params, trunc)
    assert np.all(F == 0.0)


@pytest.mark.parametrize("epsilon", [0.1, 0.01])
def test_remainder_lipschitz_scales_with_delta(params, spectrum, rng, epsilon):
    cfg = kgman.TruncationConfig.build(params, epsilon)
    delta = cfg.delta

    def draw():
        # |Z_h| ≤ δ, center part reaching past the cutoff at 2δ
        Z = kgman.project_c(kgman.random_state(spectrum, rng=rng))
        Z = (3.0 * delta * rng.uniform() / kgman.state_norm(Z, spectrum)) * Z
        angle = rng.uniform(0.0, 2.0 * np.pi)
        radius = delta * rng.uniform()
        return Z + kgman.State.single_mode(
            spectrum.dim, 0, radius * np.cos(angle), radius * np.sin(angle)
        )

    worst = 0.0
    for t in (0.0, 0.7, 3.0):
        h_t = kgman.homoclinic_state(t, params)
        for _ in range(20):
            Z, W = draw(), draw()
            dN = kgman.truncated_N(Z, h_t, params, cfg) - kgman.truncated_N(
                W, h_t, params, cfg
            )
            ratio = kgman.state_norm(dN, spectrum) / kgman.state_norm(Z - W, spectrum)
            worst = max(worst, ratio)
    assert 0.0 < worst <= 200.0 * delta


def test_zero_center_stable_solution(params, fine_trunc, spectrum):
    sol = kgman.solve_center_stable(
        kgman.State.zeros(spectrum.dim), 0.0, params, fine_trunc
    )
    assert sol.V_u == 0.0
    assert np.all(sol.Z_traj.A == 0.0) and np.all(sol.Z_traj.B == 0.0)
    assert sol.times[-1] == pytest.approx(fine_trunc.T_horizon)


def test_admissibility(params, fine_trunc, spectrum):
    eps2 = fine_trunc.epsilon ** 2
    good = _mode_datum(params, 1, 0.5 * eps2)
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.solve_center_stable(
            kgman.State.single_mode(spectrum.dim, 0, a=1e-6), 0.0, params, fine_trunc
        )
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.solve_center_stable(3.0 * good, 0.0, params, fine_trunc)
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.solve_center_stable(good, 2 * eps2, params, fine_trunc)
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.solve_center_stable(kgman.State.zeros(5), 0.0, params, fine_trunc)
    with pytest.raises(ValueError):
        kgman.solve_center_stable(good, 0.0, params, fine_trunc, method="newton")


@pytest.fixture(scope="module")
def fixed_point(params, fine_trunc):
    eps2 = fine_trunc.epsilon ** 2
    return kgman.solve_center_stable(
        _mode_datum(params, 1, 0.5 * eps2), 0.5 * eps2, params, fine_trunc
    )


def test_fixed_point_solution(fixed_point, fine_trunc):
    d = fixed_point.diagnostics
    assert d["bc_stable"] <= fine_trunc.fp_tol
    assert d["bc_center"] <= fine_trunc.fp_tol
    assert d["C_h"] <= 10.0 and d["C_c"] <= 10.0
    assert d["sup_h"] <= fine_trunc.delta
    assert abs(fixed_point.V_u) < fine_trunc.epsilon ** 2
    assert 1 <= fixed_point.iterations <= fine_trunc.max_iter
    # the hyperbolic part decays along the stable direction
    assert fixed_point.Z_traj.observables["norm_h"][-1] < 1e-3 * d["sup_h"]


@pytest.mark.slow
def test_exit_side_is_monotone_in_unstable_coefficient(params, trunc):
    V_c = _mode_datum(params, 1, 1e-3)
    V_s = 1e-3
    _, basis, _ = solver_context(params, trunc)
    stepper = kgman.Stepper(
        params, kgman.SchemeConfig(order=4, dt=trunc.dt), kgman.z_force(params, trunc)
    )
    candidates = np.linspace(-0.9, 0.9, 10) * trunc.delta
    sides = []
    for V_u in candidates:
        side, stayed = _classify(V_u, V_c, V_s, params, trunc, stepper, basis)
        assert not stayed and side != 0.0
        sides.append(side)
    # one change of exit side along the bracket
    assert np.count_nonzero(np.diff(sides)) == 1
    outside = [
        _classify(s * trunc.epsilon, V_c, V_s, params, trunc, stepper, basis)
        for s in (-1.0, 1.0)
    ]
    assert [side for side, _ in outside] == [sides[0], sides[-1]]
    assert not any(stayed for _, stayed in outside)


@pytest.mark.slow
def test_shooting_agrees_with_fixed_point(params, fine_trunc, fixed_point):
    shot = kgman.solve_center_stable(
        fixed_point.V_c, fixed_point.V_s, params, fine_trunc, method="shooting"
    )
    gap = kgman.solution_distance(fixed_point, shot, t_max=0.5 * fine_trunc.T_horizon)
    assert gap <= 1e-8
    report = kgman.truncation_consistency(shot, params)
    assert report.in_tube
    assert report.max_defect <= 1e-8


def test_psi_at_origin(params, trunc, spectrum):
    psi = kgman.center_manifold_psi(kgman.State.zeros(spectrum.dim), params, trunc)
    assert (psi.a0, psi.b0) == (0.0, 0.0)


def test_psi_scaling(params, trunc):
    scales = np.array([1e-3, 4e-3])
    psi = [
        kgman.center_manifold_psi(_mode_datum(params, 1, s), params, trunc)
        for s in scales
    ]
    norms = np.array([np.hypot(q.a0, q.b0) for q in psi])
    slope = np.log(norms[1] / norms[0]) / np.log(scales[1] / scales[0])
    assert slope >= 1.9
    # reversible data give a reversible orbit
    assert all(abs(q.b0) <= trunc.fp_tol for q in psi)


def test_center_manifold_admissibility(params, trunc, spectrum):
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.center_manifold_psi(
            _mode_datum(params, 1, 2 * trunc.delta), params, trunc
        )
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.center_manifold_psi(
            kgman.State.single_mode(spectrum.dim, 0, b=1e-4), params, trunc
        )


@pytest.mark.slow
def test_lyapunov_within_center_manifold(params, trunc):
    V_c = _mode_datum(params, 1, 1e-3)
    report = kgman.lyapunov_within_Wc(V_c, params, attr.evolve(trunc, T_horizon=100.0))
    assert report.passed
    assert report.sup_ratio <= 3.0 and report.inf_ratio >= 1.0 / 3.0
    assert report.flow_defect <= 1e-6
    assert report.j_drift < 0.05
    assert report.h_over_delta3 <= 10.0


def test_lyapunov_report_enforces_j_and_h_bounds(params, trunc):
    V_c = _mode_datum(params, 1, 1e-3)
    report = kgman.lyapunov_within_Wc(V_c, params, trunc)
    assert report.passed
    assert 0.0 < report.j_drift < report.j_tolerance == 0.05
    assert report.h_over_delta3 == pytest.approx(report.sup_h / trunc.delta ** 3)
    tight_j = kgman.lyapunov_within_Wc(V_c, params, trunc, j_tolerance=1e-14)
    assert not tight_j.passed
    tight_h = kgman.lyapunov_within_Wc(V_c, params, trunc, h_constant=0.0)
    assert not tight_h.passed


@pytest.mark.slow
def test_convergence_to_center_manifold(params, trunc):
    eps2 = trunc.epsilon ** 2
    sol = kgman.solve_center_stable(
        _mode_datum(params, 1, 0.5 * eps2), 0.5 * eps2, params, trunc
    )
    report = kgman.convergence_to_Wc(sol, params)
    assert report.passed
    assert report.rate >= trunc.r
    assert report.d_eps_ratio <= 10.0
    assert len(report.times) == 12


def test_reflect():
    times = np.array([0.0, 1.0, 2.0])
    A = np.array([[1.0], [2.0], [3.0]])
    B = np.array([[0.0], [5.0], [6.0]])
    t, A_full, B_full = kgman.reflect(times, A, B)
    assert np.array_equal(t, [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert np.array_equal(A_full[:, 0], [3.0, 2.0, 1.0, 2.0, 3.0])
    assert np.array_equal(B_full[:, 0], [-6.0, -5.0, 0.0, 5.0, 6.0])


def test_heteroclinic_needs_zero_momenta(params, trunc):
    V_c = _mode_datum(params, 1, 1e-3, momentum=0.5)
    with pytest.raises(kgman.errors.AdmissibilityError):
        kgman.reversible_heteroclinic(V_c, params, trunc)


def test_heteroclinic_of_zero_datum_is_homoclinic(params, trunc, spectrum):
    orbit = kgman.reversible_heteroclinic(
        kgman.State.zeros(spectrum.dim), params, trunc
    )
    assert orbit.symmetry_residual == 0.0
    assert orbit.backward_mismatch == 0.0
    assert orbit.tracking_constant == 0.0
    assert np.allclose(orbit.A[:, 0], kgman.alpha(orbit.times, params), atol=1e-15)
    assert np.allclose(orbit.B[:, 0], kgman.beta(orbit.times, params), atol=1e-15)
    assert orbit.times[0] == -orbit.times[-1]


def test_reflection_mismatch_rejects_off_manifold_data(params, trunc, spectrum):
    sol = kgman.solve_center_stable(
        kgman.State.zeros(spectrum.dim), 0.0, params, trunc
    )
    window = 5.0 / params.m
    Z0 = sol.Z_traj.state(0)
    assert kgman.reflection_mismatch(Z0, sol.Z_traj, params, trunc, window) == 0.0
    # reversible and within 1e-8 at t = 0, but off the manifold along ρ(0)
    off = kgman.State.single_mode(spectrum.dim, 0, a=1e-9)
    assert np.all(off.b == 0.0)
    assert kgman.state_norm(off - Z0, spectrum) < 1e-8
    mismatch = kgman.reflection_mismatch(off, sol.Z_traj, params, trunc, window)
    assert mismatch > 1e-8
    with pytest.raises(ValueError):
        kgman.reflection_mismatch(off, sol.Z_traj, params, trunc, 0.0)
    with pytest.raises(ValueError):
        kgman.reflection_mismatch(off, sol.Z_traj, params, trunc, 2 * trunc.T_horizon)


@pytest.mark.slow
def test_heteroclinic_orbit(params):
    cfg = kgman.TruncationConfig.build(params, 0.04)
    orbit = kgman.reversible_heteroclinic(_mode_datum(params, 1, 1e-3), params, cfg)
    assert orbit.symmetry_residual <= cfg.fp_tol
    assert orbit.backward_mismatch <= 1e-8
    assert np.isfinite(orbit.tracking_constant) and orbit.tracking_constant > 0
    assert orbit.target_minus == kgman.apply_symmetry(orbit.target_plus)
    mid = len(orbit.times) // 2
    assert orbit.times[mid] == 0.0
    assert np.allclose(orbit.A[mid - 10], orbit.A[mid + 10])
    assert np.allclose(orbit.B[mid - 10], -orbit.B[mid + 10])
