#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Optional

import attr
import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import lfilter

from kgman.core.functionals import j_functionals
from kgman.core.params import ModelParams
from kgman.core.spectrum import spectrum_for
from kgman.core.state import (
    HyperbolicPoint,
    State,
    center_norms,
    state_norm,
    state_norms,
)
from kgman.errors import AdmissibilityError, PicardDivergenceError, assert_elliptic
from kgman.evolve.integrator import integrate
from kgman.evolve.scheme import SchemeConfig
from kgman.linearized.modes import free_flow, mode_frequencies
from kgman.logging import logger
from kgman.manifolds.truncation import (
    TruncationConfig,
    truncated_F_force,
    truncated_x_force,
)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class CenterManifoldOrbit(object):
    r"""Orbit of the truncated system on the center manifold

    Args:
        V_c (State): Center part at t = 0
        times (np.ndarray): Symmetric window ``[-T, T]``, 0 at the middle
        A (np.ndarray): Position coefficients, one row per time
        B (np.ndarray): Momentum coefficients
        psi (HyperbolicPoint): ``Ψ(V_c)``, the hyperbolic part at t = 0
        iterations (int): Picard iterations used
    """
    V_c: State
    times: np.ndarray
    A: np.ndarray
    B: np.ndarray
    psi: HyperbolicPoint
    iterations: int

    @property
    def center_index(self) -> int:
        return len(self.times) // 2

    def state(self, i: int) -> State:
        return State(self.A[i], self.B[i])


def _exp_filter(x: np.ndarray, dt: float, m: float) -> np.ndarray:
    r"""``I(t_k) = ∫_{t_0}^{t_k} e^{-m(t_k-τ)}x(τ)dτ`` by trapezoid recursion"""
    q = np.exp(-m * dt)
    b = [0.5 * dt, 0.5 * dt * q]
    a = [1.0, -q]
    y, _ = lfilter(b, a, x, zi=[-b[0] * x[0]])
    return y


def _hyperbolic_part(f0: np.ndarray, dt: float, m: float):
    r"""Bounded solution of ``ȧ = b, ḃ = m²a + f`` on the window

    With ``σ_0 = (1, -m)``, ``ρ_0 = (1, m)`` and the duals
    ``σ_0* = -(−m, 1)/(2m)``, ``ρ_0* = (m, 1)/(2m)``, the stable part
    integrates from the left end and the unstable part from the right end.
    """
    stable = _exp_filter(-f0 / (2.0 * m), dt, m)
    unstable = _exp_filter((f0 / (2.0 * m))[::-1], dt, m)[::-1]
    return stable - unstable, -m * (stable + unstable)


def _center_part(V_c: State, f: np.ndarray, times: np.ndarray, omega: np.ndarray, i0):
    r"""``K(t)[V_c + ∫_0^t K(-τ)(0, f(τ))dτ]`` for the free elliptic flow"""
    s = times[:, None]
    g = f[:, 1:]
    ga = -np.sin(omega * s) * g / omega
    gb = np.cos(omega * s) * g
    Ia = cumulative_trapezoid(ga, times, axis=0, initial=0.0)
    Ib = cumulative_trapezoid(gb, times, axis=0, initial=0.0)
    za = V_c.a[1:] + Ia - Ia[i0]
    zb = V_c.b[1:] + Ib - Ib[i0]
    moved = free_flow(np.stack([za, zb], axis=-1), omega, s)
    A = np.zeros((len(times), V_c.dim))
    B = np.zeros((len(times), V_c.dim))
    A[:, 1:] = moved[..., 0]
    B[:, 1:] = moved[..., 1]
    return A, B


def check_center_datum(V_c: State, params: ModelParams, cfg: TruncationConfig):
    spectrum = spectrum_for(params)
    if V_c.dim != spectrum.dim:
        raise AdmissibilityError(
            f"V_c has {V_c.dim} entries, the spectrum has {spectrum.dim}"
        )
    assert_elliptic(V_c.a, V_c.b)
    norm = state_norm(V_c, spectrum)
    if norm > cfg.center_radius * (1.0 + 1e-12):
        raise AdmissibilityError(
            f"‖V_c‖ = {norm:.6g} is outside the admissible center ball of "
            f"radius {cfg.center_radius:.6g}"
        )


def center_manifold_orbit(
    V_c: State,
    params: ModelParams,
    cfg: TruncationConfig,
    T: Optional[float] = None,
) -> CenterManifoldOrbit:
    r"""Solution of the truncated system with center part V_c at t = 0 and
    bounded hyperbolic part

    Picard iteration of the Duhamel map on the window ``[-T, T]``
    (``T_horizon`` by default) with the constant-coefficient hyperbolic
    basis: the stable component integrates from ``-T``, the unstable one
    from ``+T`` and the center part is the free elliptic flow forced by
    ``QF``. The hyperbolic part at t = 0 is ``Ψ(V_c)``.

    Raises:
        AdmissibilityError: If V_c has a mode-0 part or leaves the
            admissible center ball
        PicardDivergenceError: If the iteration does not converge
    """
    check_center_datum(V_c, params, cfg)
    T = cfg.T_horizon if T is None else T
    n = max(1, int(round(T / cfg.dt)))
    dt = T / n
    times = dt * np.arange(-n, n + 1)
    m = params.m
    omega = mode_frequencies(params)
    lam = spectrum_for(params).lam

    free = free_flow(np.stack([V_c.a[1:], V_c.b[1:]], axis=-1), omega, times[:, None])
    A = np.zeros((len(times), V_c.dim))
    B = np.zeros((len(times), V_c.dim))
    A[:, 1:] = free[..., 0]
    B[:, 1:] = free[..., 1]

    for it in range(1, cfg.max_iter + 1):
        f = truncated_F_force(A, B, params, cfg)
        A_new, B_new = _center_part(V_c, f, times, omega, n)
        A_new[:, 0], B_new[:, 0] = _hyperbolic_part(f[:, 0], dt, m)
        if not (np.all(np.isfinite(A_new)) and np.all(np.isfinite(B_new))):
            raise PicardDivergenceError(f"Picard iterate {it} is not finite")
        update = float(np.max(state_norms(A_new - A, B_new - B, lam)))
        A, B = A_new, B_new
        if it > 1 and update < cfg.fp_tol:
            break
    else:
        raise PicardDivergenceError(
            f"Center manifold iteration did not converge in {cfg.max_iter} steps "
            f"(last update {update:.3e})"
        )

    psi = HyperbolicPoint(float(A[n, 0]), float(B[n, 0]))
    logger.debug(f"Ψ = ({psi.a0:.6e}, {psi.b0:.6e}) after {it} iterations")
    return CenterManifoldOrbit(
        V_c=V_c, times=times, A=A, B=B, psi=psi, iterations=it
    )


def center_manifold_psi(
    V_c: State, params: ModelParams, cfg: TruncationConfig
) -> HyperbolicPoint:
    r"""``Ψ(V_c)``: the point ``(Ψ(V_c), V_c)`` lies on the center manifold"""
    return center_manifold_orbit(V_c, params, cfg).psi


@attr.s(auto_attribs=True, frozen=True)
class LyapunovReport(object):
    r"""Stability of an orbit within the center manifold

    Args:
        sup_ratio (float): ``sup_t ‖X_c(t)‖ / ‖V_c‖``
        inf_ratio (float): ``inf_t ‖X_c(t)‖ / ‖V_c‖``
        sup_h (float): ``sup_t |X_h(t)|``
        h_over_delta3 (float): ``sup_h / δ³``
        j_drift (float): ``(max J - min J) / J(t_star)``
        flow_defect (float): Gap between the orbit and a direct integration
            of the truncated system from ``(Ψ(V_c), V_c)``
        flow_window (float): Length of that integration
        constant (float): Bound C used for the ratio checks
        j_tolerance (float): Bound on j_drift
        h_constant (float): Bound on h_over_delta3
        passed (bool): ``1/C ≤ inf_ratio``, ``sup_ratio ≤ C``, ``j_drift <
            j_tolerance`` and ``h_over_delta3 ≤ h_constant``
    """
    sup_ratio: float
    inf_ratio: float
    sup_h: float
    h_over_delta3: float
    j_drift: float
    flow_defect: float
    flow_window: float
    constant: float
    j_tolerance: float
    h_constant: float
    passed: bool


def lyapunov_within_Wc(
    V_c: State,
    params: ModelParams,
    cfg: TruncationConfig,
    t_star: float = 0.0,
    constant: float = 3.0,
    flow_window: Optional[float] = None,
    j_tolerance: float = 0.05,
    h_constant: float = 10.0,
) -> LyapunovReport:
    r"""Checks that the center part stays comparable to V_c along the orbit

    The orbit through ``(Ψ(V_c), V_c)`` is computed on ``[-T_horizon,
    T_horizon]``. The report carries the range of ``‖X_c(t)‖/‖V_c‖``, the
    size of the hyperbolic part against δ³, the relative variation of J
    and, as a cross-check, the defect of a direct splitting integration of
    the truncated system over ``flow_window`` (default ``min(T, 5/m)``).
    ``passed`` also requires ``j_drift < j_tolerance`` and
    ``sup|X_h| ≤ h_constant·δ³``.
    """
    orbit = center_manifold_orbit(V_c, params, cfg)
    lam = spectrum_for(params).lam
    norm0 = state_norm(V_c, spectrum_for(params))
    norms = center_norms(orbit.A, orbit.B, lam)
    sup_h = float(np.max(np.hypot(orbit.A[:, 0], orbit.B[:, 0])))

    if norm0 == 0:
        report = LyapunovReport(
            sup_ratio=0.0,
            inf_ratio=0.0,
            sup_h=sup_h,
            h_over_delta3=sup_h / cfg.delta ** 3,
            j_drift=0.0,
            flow_defect=0.0,
            flow_window=0.0,
            constant=constant,
            j_tolerance=j_tolerance,
            h_constant=h_constant,
            passed=bool(np.max(norms) == 0.0 and sup_h == 0.0),
        )
        return report

    J = j_functionals(orbit.A, orbit.B, params)
    i_star = int(np.argmin(np.abs(orbit.times - t_star)))
    j_drift = float((J.max() - J.min()) / J[i_star])

    if flow_window is None:
        flow_window = min(cfg.T_horizon, 5.0 / params.m)
    scheme = SchemeConfig(order=4, dt=cfg.dt)
    start = orbit.state(orbit.center_index)
    traj = integrate(
        start,
        flow_window,
        params,
        scheme,
        observers={},
        force=truncated_x_force(params, cfg),
        check_drift=False,
    )
    idx = orbit.center_index + np.arange(len(traj))
    idx = idx[idx < len(orbit.times)]
    flow_defect = float(
        np.max(
            state_norms(
                traj.A[: len(idx)] - orbit.A[idx],
                traj.B[: len(idx)] - orbit.B[idx],
                lam,
            )
        )
    )

    sup_ratio = float(norms.max() / norm0)
    inf_ratio = float(norms.min() / norm0)
    h_over_delta3 = sup_h / cfg.delta ** 3
    passed = (
        sup_ratio <= constant
        and inf_ratio >= 1.0 / constant
        and j_drift < j_tolerance
        and h_over_delta3 <= h_constant
    )
    logger.info(
        f"Lyapunov check: ‖X_c‖/‖V_c‖ in [{inf_ratio:.4g}, {sup_ratio:.4g}], "
        f"J drift {j_drift:.3e}, sup|X_h| {sup_h:.3e}"
    )
    return LyapunovReport(
        sup_ratio=sup_ratio,
        inf_ratio=inf_ratio,
        sup_h=sup_h,
        h_over_delta3=h_over_delta3,
        j_drift=j_drift,
        flow_defect=flow_defect,
        flow_window=float(flow_window),
        constant=constant,
        j_tolerance=j_tolerance,
        h_constant=h_constant,
        passed=bool(passed),
    )
