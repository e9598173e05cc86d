#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Dict, Optional, Sequence

import attr
import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson, solve_ivp

from kgman.core.params import ModelParams
from kgman.core.spectrum import spectrum_for
from kgman.core.state import State, mode_norm
from kgman.errors import TailToleranceError, assert_elliptic
from kgman.linearized.basis import (
    ODE_ATOL,
    ODE_MAX_STEP,
    ODE_RTOL,
    hyperbolic_potential,
)
from kgman.linearized.certificate import alpha_power_tail
from kgman.logging import logger
from kgman.utils import uniform_grid


def mode_frequencies(params: ModelParams) -> np.ndarray:
    r"""``ω_n = (λ_n² - m²)^{1/2}`` for every elliptic entry n ≥ 1"""
    lam = spectrum_for(params).lam[1:]
    return np.sqrt(lam ** 2 - params.m ** 2)


def _omega(n: int, params: ModelParams) -> float:
    spectrum = spectrum_for(params)
    if not 1 <= n < spectrum.dim:
        raise ValueError(
            f"Mode {n} is not an elliptic entry of the spectrum (1..{spectrum.dim - 1})"
        )
    return float(np.sqrt(spectrum.lam[n] ** 2 - params.m ** 2))


def _mode_rhs(omega2: np.ndarray, params: ModelParams, potential: bool):
    r"""``ẋ = y, ẏ = -(ω² + (2p+1)α^{2p})x`` for stacked ``(x, y)`` pairs"""

    def rhs(t, y):
        q = hyperbolic_potential(t, params) if potential else 0.0
        x, v = y[0::2], y[1::2]
        out = np.empty_like(y)
        out[0::2] = v
        out[1::2] = -(omega2 + q) * x
        return out

    return rhs


def _solve(rhs, y0, t_span, t_eval=None):
    sol = solve_ivp(
        rhs,
        t_span,
        y0,
        method="DOP853",
        t_eval=t_eval,
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        max_step=ODE_MAX_STEP,
    )
    if not sol.success:
        raise RuntimeError(f"Mode integration failed: {sol.message}")
    return sol


def mode_propagate(
    n: int,
    z0,
    t0: float,
    t1: float,
    params: ModelParams,
    potential: bool = True,
) -> np.ndarray:
    r"""Applies ``K_n(t1, t0)`` to ``z0 = (a_n, b_n)``

    Mode n of the linearization around the homoclinic decouples into
    ``ȧ_n = b_n, ḃ_n = -(λ_n² - m²)a_n - (2p+1)α(t)^{2p}a_n``.

    Args:
        n (int): Elliptic entry of the spectrum, n ≥ 1
        z0: Initial pair at t0
        t0 (float): Initial time
        t1 (float): Final time (may be smaller than t0)
        params (ModelParams): The model
        potential (bool): False drops the α-term, leaving the free rotation

    Returns:
        np.ndarray: The pair at t1
    """
    omega = _omega(n, params)
    z0 = np.asarray(z0, dtype=np.float64)
    if t1 == t0:
        return z0.copy()
    rhs = _mode_rhs(np.array([omega ** 2]), params, potential)
    sol = _solve(rhs, z0, (float(t0), float(t1)))
    return sol.y[:, -1].copy()


def mode_path(
    n: int,
    z0,
    times: np.ndarray,
    params: ModelParams,
    potential: bool = True,
) -> np.ndarray:
    r"""Samples of mode n started from z0 at ``times[0]``, shape ``(len(times), 2)``"""
    omega = _omega(n, params)
    rhs = _mode_rhs(np.array([omega ** 2]), params, potential)
    sol = _solve(
        rhs, np.asarray(z0, dtype=np.float64), (times[0], times[-1]), times
    )
    return sol.y.T.copy()


def mode_sup_ratio(
    n: int,
    z0,
    params: ModelParams,
    T: float,
    dt: float = 1e-2,
    potential: bool = True,
) -> float:
    r"""Measured ``sup_{[0,T]} |z(t)|_n / |z0|_n`` in the mode energy norm"""
    omega = _omega(n, params)
    lam = float(spectrum_for(params).lam[n])
    norm0 = mode_norm(np.asarray(z0, dtype=np.float64), lam, params.m)
    if norm0 == 0:
        return 0.0
    path = mode_path(n, z0, uniform_grid(0.0, T, dt), params, potential)
    norms = np.sqrt(omega ** 2 * path[:, 0] ** 2 + path[:, 1] ** 2)
    return float(norms.max() / norm0)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class CenterPropagator(object):
    r"""Fundamental matrices ``Φ_n(t) = K_n(t, 0)`` of all elliptic modes

    ``Phi`` has shape ``(len(times), dim - 1, 2, 2)``, column j being the
    solution started from the j-th unit vector. Each ``Φ_n(t)`` has unit
    determinant.
    """
    params: ModelParams
    times: np.ndarray
    Phi: np.ndarray

    def apply(self, a: np.ndarray, b: np.ndarray):
        r"""``K(t, 0)(a, b)`` at every grid time for a center datum (mode 0 ignored)

        Returns:
            Two arrays of shape ``(len(times), dim)`` with zero mode 0
        """
        n = len(self.times)
        A = np.zeros((n, len(a)))
        B = np.zeros((n, len(a)))
        A[:, 1:] = self.Phi[:, :, 0, 0] * a[1:] + self.Phi[:, :, 0, 1] * b[1:]
        B[:, 1:] = self.Phi[:, :, 1, 0] * a[1:] + self.Phi[:, :, 1, 1] * b[1:]
        return A, B

    def duhamel(self, a0: np.ndarray, b0: np.ndarray, forcing: np.ndarray):
        r"""Solution of ``Ż_c = L_c(t)Z_c + (0, f(t))`` with ``Z_c(0) = (a0, b0)``

        ``Z_c(t) = Φ(t)[Z_c(0) + ∫_0^t Φ(τ)^{-1}(0, f(τ))dτ]`` by trapezoid
        quadrature on the grid; 0 must be a grid time, and integration runs
        outward from it in both directions.

        Args:
            a0 (np.ndarray): Position part of the datum at t = 0
            b0 (np.ndarray): Momentum part of the datum at t = 0
            forcing (np.ndarray): ``(len(times), dim)`` samples of f; column
                0 is ignored
        """
        i0 = int(np.argmin(np.abs(self.times)))
        f = forcing[:, 1:]
        # Φ^{-1}(0, f) = (-Φ_01 f, Φ_00 f) since det Φ = 1
        ga = -self.Phi[:, :, 0, 1] * f
        gb = self.Phi[:, :, 0, 0] * f
        Ia = cumulative_trapezoid(ga, self.times, axis=0, initial=0.0)
        Ib = cumulative_trapezoid(gb, self.times, axis=0, initial=0.0)
        Ia -= Ia[i0]
        Ib -= Ib[i0]
        ca = a0[1:] + Ia
        cb = b0[1:] + Ib
        A = np.zeros_like(forcing)
        B = np.zeros_like(forcing)
        A[:, 1:] = self.Phi[:, :, 0, 0] * ca + self.Phi[:, :, 0, 1] * cb
        B[:, 1:] = self.Phi[:, :, 1, 0] * ca + self.Phi[:, :, 1, 1] * cb
        return A, B


def center_propagator(params: ModelParams, times: np.ndarray) -> CenterPropagator:
    r"""Samples ``Φ_n(t)`` for every elliptic entry on a grid containing 0

    Entries sharing a frequency share one ODE solve. Negative times use the
    reversibility of the even potential: ``Φ(-t) = SΦ(t)S`` with
    ``S = diag(1, -1)``.
    """
    times = np.asarray(times, dtype=np.float64)
    omega = mode_frequencies(params)
    unique, inverse = np.unique(omega, return_inverse=True)
    k = len(unique)

    abs_times = np.unique(np.abs(times))
    omega2 = np.repeat(unique ** 2, 2)
    y0 = np.zeros(4 * k)
    y0[0::4] = 1.0  # column 0: (1, 0)
    y0[3::4] = 1.0  # column 1: (0, 1)
    rhs = _mode_rhs(omega2, params, potential=True)
    if abs_times[-1] > 0:
        sol = _solve(rhs, y0, (0.0, abs_times[-1]), abs_times)
        y = sol.y.T
    else:
        y = y0[None, :]

    # y rows hold per frequency (x0, y0, x1, y1): Φ = [[x0, x1], [y0, y1]]
    y = y.reshape(len(abs_times), k, 2, 2)
    Phi_abs = np.swapaxes(y, -1, -2)
    index = np.searchsorted(abs_times, np.abs(times))
    Phi = Phi_abs[index][:, inverse].copy()
    neg = times < 0
    Phi[neg, :, 0, 1] *= -1.0
    Phi[neg, :, 1, 0] *= -1.0
    return CenterPropagator(params=params, times=times, Phi=Phi)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class TorusInvariants(object):
    r"""Asymptotic free data of the linearized center dynamics

    Every elliptic mode scatters to ``S(t)(a_n^+, b_n^+)``, a point of the
    torus level ``c_n² = ω_n²a_n^{+2} + b_n^{+2}``.

    Args:
        a_plus (np.ndarray): Asymptotic positions, one per elliptic entry
        b_plus (np.ndarray): Asymptotic momenta
        c (np.ndarray): Torus levels
        omega (np.ndarray): Free frequencies ω_n
        checkpoints (np.ndarray): Times where the scattering was verified
        residuals (np.ndarray): ``max_n |z_n(t) - S(t)z_n^+|_n`` per checkpoint
        residual_bounds (np.ndarray): Closed-form bound on those residuals
        tail_bound (float): Bound on the neglected part of the integral
    """
    a_plus: np.ndarray
    b_plus: np.ndarray
    c: np.ndarray
    omega: np.ndarray
    checkpoints: np.ndarray = attr.ib(factory=lambda: np.zeros(0))
    residuals: np.ndarray = attr.ib(factory=lambda: np.zeros(0))
    residual_bounds: np.ndarray = attr.ib(factory=lambda: np.zeros(0))
    tail_bound: float = 0.0

    def __attrs_post_init__(self):
        if np.any(self.c < 0):
            raise ValueError("Torus levels must be nonnegative")


def free_flow(z: np.ndarray, omega: np.ndarray, t) -> np.ndarray:
    r"""``S(t)z`` for the rotation ``ẋ = y, ẏ = -ω²x``, z of shape ``(..., 2)``"""
    c = np.cos(omega * t)
    s = np.sin(omega * t)
    x, y = z[..., 0], z[..., 1]
    return np.stack([c * x + s / omega * y, -omega * s * x + c * y], axis=-1)


def torus_levels(A: np.ndarray, B: np.ndarray, params: ModelParams) -> np.ndarray:
    r"""``c_n(t) = (ω_n²a_n² + b_n²)^{1/2}`` for stacked states, elliptic entries"""
    omega = mode_frequencies(params)
    return np.sqrt(omega ** 2 * A[..., 1:] ** 2 + B[..., 1:] ** 2)


def scatter_asymptotics(
    Zc0: State,
    params: ModelParams,
    T_trunc: float,
    dt: float = 1e-2,
    tail_tol: float = 1e-8,
    checkpoints: Optional[Sequence[float]] = None,
    potential: bool = True,
) -> TorusInvariants:
    r"""Scattering data of the linearized center dynamics

    ``z^+ = z(0) - (2p+1)∫_0^∞ S(-s)(0, α(s)^{2p}a_n(s))ds`` per mode, with
    the integral cut at T_trunc and evaluated by Simpson quadrature along the
    propagated path. The neglected tail is bounded in closed form by
    ``(2p+1)·sup|a_n|·∫_{T_trunc}^∞ α^{2p}``.

    Args:
        Zc0 (State): Center datum (mode 0 must vanish)
        params (ModelParams): The model
        T_trunc (float): Quadrature cutoff
        dt (float): Grid spacing of the propagated path
        tail_tol (float): Largest acceptable tail bound
        checkpoints (Optional[Sequence[float]]): Times to verify
            ``|z(t) - S(t)z^+|_n``; defaults to ``{10, 20, 40}/m`` within reach
        potential (bool): False gives the free flow, for which ``z^+ = z(0)``

    Raises:
        TailToleranceError: If the tail bound exceeds tail_tol
    """
    assert_elliptic(Zc0.a, Zc0.b)
    omega_all = mode_frequencies(params)
    a0, b0 = Zc0.a[1:], Zc0.b[1:]
    active = np.flatnonzero((a0 != 0) | (b0 != 0))

    a_plus = a0.copy()
    b_plus = b0.copy()
    if checkpoints is None:
        checkpoints = [c / params.m for c in (10.0, 20.0, 40.0)]
    checkpoints = np.array([t for t in checkpoints if 0 <= t <= T_trunc])
    residuals = np.zeros(len(checkpoints))
    bounds = np.zeros(len(checkpoints))
    tail = 0.0

    if len(active) and potential:
        omega = omega_all[active]
        times = uniform_grid(0.0, T_trunc, dt)
        y0 = np.empty(2 * len(active))
        y0[0::2] = a0[active]
        y0[1::2] = b0[active]
        rhs = _mode_rhs(omega ** 2, params, potential=True)
        path = _solve(rhs, y0, (0.0, T_trunc), times).y.T
        a_path = path[:, 0::2]

        sup_a = np.max(np.abs(a_path), axis=0)
        coeff = params.degree * float(np.max(sup_a))
        tail = coeff * float(alpha_power_tail(T_trunc, params))
        if tail > tail_tol:
            raise TailToleranceError(
                f"Tail bound {tail:.3e} at T_trunc={T_trunc:g} exceeds {tail_tol:.1e}; "
                "increase T_trunc"
            )

        g = hyperbolic_potential(times, params)[:, None] * a_path
        s = times[:, None]
        # S(-s)(0, g) = (-sin(ωs)g/ω, cos(ωs)g)
        shift_a = simpson(-np.sin(omega * s) * g / omega, x=times, axis=0)
        shift_b = simpson(np.cos(omega * s) * g, x=times, axis=0)
        a_plus[active] = a0[active] - shift_a
        b_plus[active] = b0[active] - shift_b

        z_plus = np.column_stack([a_plus[active], b_plus[active]])
        for i, t in enumerate(checkpoints):
            k = int(np.argmin(np.abs(times - t)))
            checkpoints[i] = times[k]
            z_t = np.column_stack([path[k, 0::2], path[k, 1::2]])
            diff = z_t - free_flow(z_plus, omega, times[k])
            res = np.sqrt(omega ** 2 * diff[:, 0] ** 2 + diff[:, 1] ** 2)
            residuals[i] = float(res.max())
            bounds[i] = coeff * float(alpha_power_tail(times[k], params))
        logger.info(
            f"Scattering of {len(active)} modes: tail={tail:.2e}, "
            f"residuals={np.array2string(residuals, precision=3)}"
        )

    c = np.sqrt(omega_all ** 2 * a_plus ** 2 + b_plus ** 2)
    return TorusInvariants(
        a_plus=a_plus,
        b_plus=b_plus,
        c=c,
        omega=omega_all,
        checkpoints=checkpoints,
        residuals=residuals,
        residual_bounds=bounds,
        tail_bound=tail,
    )


def torus_level_drift(
    Zc0: State, params: ModelParams, times: np.ndarray, potential: bool = True
) -> Dict[str, np.ndarray]:
    r"""Torus levels ``c_n(t)`` along the propagated center path

    Returns:
        Dict[str, np.ndarray]: ``times`` and ``levels`` of shape
            ``(len(times), dim - 1)``
    """
    if not potential:
        omega = mode_frequencies(params)
        z = np.stack([Zc0.a[1:], Zc0.b[1:]], axis=-1)
        moved = free_flow(z[None], omega, np.asarray(times)[:, None])
        A = np.concatenate([np.zeros((len(times), 1)), moved[..., 0]], axis=1)
        B = np.concatenate([np.zeros((len(times), 1)), moved[..., 1]], axis=1)
    else:
        A, B = center_propagator(params, times).apply(Zc0.a, Zc0.b)
    return {"times": np.asarray(times), "levels": torus_levels(A, B, params)}
