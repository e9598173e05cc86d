#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Optional

import attr
import numpy as np

from kgman.core.params import ModelParams
from kgman.core.spectrum import spectrum_for
from kgman.core.state import State, apply_symmetry, state_norm, state_norms
from kgman.errors import AdmissibilityError, SymmetryResidualError
from kgman.evolve.integrator import Trajectory, integrate_backward
from kgman.evolve.scheme import SchemeConfig
from kgman.homoclinic import HomoclinicOrbit
from kgman.logging import logger
from kgman.manifolds.center import center_manifold_psi
from kgman.manifolds.center_stable import CenterStableSolution, solve_center_stable
from kgman.manifolds.truncation import TruncationConfig, z_force


@attr.s(auto_attribs=True, frozen=True, eq=False)
class HeteroclinicOrbit(object):
    r"""Reversible orbit leaving and reaching the center manifold

    Args:
        times (np.ndarray): Symmetric window ``[-T, T]``
        A (np.ndarray): Position coefficients of ``X = Z + h``
        B (np.ndarray): Momentum coefficients of X
        solution (CenterStableSolution): Forward half, ``t ≥ 0``
        symmetry_residual (float): ``max|b(0)|`` of the assembled datum; checks
            that the solver kept ``V_s = 0`` and the momenta of V_c at zero
        backward_mismatch (float): ``sup ‖Z(-t) - S Z(t)‖`` between a direct
            backward integration and the reflected forward samples
        backward_window (float): Length of that comparison
        tracking_constant (float): ``sup_t (‖u - α‖_{H¹} + ‖∂_t u - β‖_{L²})``
            over ``‖f_c‖``
        target_plus (State): ``X̃ = (Ψ(X_c(T)), X_c(T))``, approached as t → ∞
        target_minus (State): ``S X̃``, approached as t → -∞
    """
    times: np.ndarray
    A: np.ndarray
    B: np.ndarray
    solution: CenterStableSolution
    symmetry_residual: float
    backward_mismatch: float
    backward_window: float
    tracking_constant: float
    target_plus: State
    target_minus: State

    def state(self, i: int) -> State:
        return State(self.A[i], self.B[i])


def reflect(times: np.ndarray, A: np.ndarray, B: np.ndarray):
    r"""Extends samples on ``[0, T]`` to ``[-T, T]`` by ``X(-t) = S X(t)``"""
    t = np.concatenate([-times[:0:-1], times])
    A_full = np.concatenate([A[:0:-1], A])
    B_full = np.concatenate([-B[:0:-1], B])
    return t, A_full, B_full


def reflection_mismatch(
    Z0: State,
    forward: Trajectory,
    params: ModelParams,
    cfg: TruncationConfig,
    window: float,
) -> float:
    r"""Sup over ``0 ≤ t ≤ window`` of ``‖Z(-t) - S Z(t)‖``

    ``Z(-t)`` comes from a direct backward integration of the cutoff
    deviation system started at ``Z0``; ``Z(t)`` are the forward samples.
    Only a datum on the center-stable manifold has a bounded backward
    continuation that matches the reflection; any other reversible datum
    separates along the unstable direction at rate m.

    Raises:
        ValueError: If the window is not positive or exceeds the forward samples
    """
    n = int(round(window / cfg.dt))
    if n < 1:
        raise ValueError(f"backward window must be positive, got {window!r}")
    window = n * cfg.dt
    if window > forward.times[-1] + 1e-9:
        raise ValueError(
            f"backward window {window:g} exceeds the forward samples "
            f"up to t={forward.times[-1]:g}"
        )
    back = integrate_backward(
        Z0,
        window,
        params,
        SchemeConfig(order=4, dt=cfg.dt),
        method="direct",
        observers={},
        force=z_force(params, cfg),
        check_drift=False,
    )
    _, ib, jf = np.intersect1d(
        np.round(-back.times, 9), np.round(forward.times, 9), return_indices=True
    )
    lam = spectrum_for(params).lam
    gap = state_norms(back.A[ib] - forward.A[jf], back.B[ib] + forward.B[jf], lam)
    return float(gap.max())


def reversible_heteroclinic(
    V_c: State,
    params: ModelParams,
    cfg: TruncationConfig,
    method: str = "fixed_point",
    backward_window: Optional[float] = None,
) -> HeteroclinicOrbit:
    r"""Orbit through ``u(0) = α(0) + V_u + f_c``, ``∂_t u(0) = 0``

    Solves the center-stable problem with ``V_s = 0`` and a center datum
    with vanishing momenta; the resulting X(0) lies in the fixed plane of S,
    so the orbit is reversible and the negative half-line is the reflection
    ``X(-t) = S X(t)``. The reflection is certified by integrating the
    deviation system backward from Z(0) over ``backward_window`` (default
    ``min(T_horizon, 5/m)``) and comparing with ``S Z(t)``; errors at t = 0
    grow like ``e^{mt}`` backward, which bounds the usable window.

    Raises:
        AdmissibilityError: If V_c has nonzero momenta
        SymmetryResidualError: If ``b(0)`` does not vanish within fp_tol
    """
    if np.any(V_c.b != 0.0):
        raise AdmissibilityError(
            "Reversible data need a center datum with vanishing momenta"
        )
    sol = solve_center_stable(V_c, 0.0, params, cfg, method)
    traj = sol.Z_traj
    orbit = HomoclinicOrbit(params)

    X0 = sol.full_state(0)
    residual = float(np.max(np.abs(X0.b)))
    if residual > cfg.fp_tol:
        raise SymmetryResidualError(
            f"b(0) = {residual:.3e} exceeds {cfg.fp_tol:.1e}; the forward solve "
            "did not land in the reversible plane"
        )

    A = traj.A.copy()
    B = traj.B.copy()
    A[:, 0] += orbit.alpha(traj.times)
    B[:, 0] += orbit.beta(traj.times)
    times, A_full, B_full = reflect(traj.times, A, B)

    if backward_window is None:
        backward_window = min(cfg.T_horizon, 5.0 / params.m)
    mismatch = reflection_mismatch(traj.state(0), traj, params, cfg, backward_window)

    lam = spectrum_for(params).lam
    norm_fc = state_norm(V_c, spectrum_for(params))
    if norm_fc > 0:
        dev = np.sqrt(np.sum((1.0 + lam ** 2) * traj.A ** 2, axis=1))
        dev += np.sqrt(np.sum(traj.B ** 2, axis=1))
        tracking = float(dev.max() / norm_fc)
    else:
        tracking = 0.0

    Zc_end = traj.state(len(traj) - 1)
    center_end = State(
        np.concatenate([[0.0], Zc_end.a[1:]]), np.concatenate([[0.0], Zc_end.b[1:]])
    )
    psi_cfg = attr.evolve(cfg, T_horizon=20.0 / params.m)
    psi = center_manifold_psi(center_end, params, psi_cfg)
    target = State(
        np.concatenate([[psi.a0], center_end.a[1:]]),
        np.concatenate([[psi.b0], center_end.b[1:]]),
    )
    logger.info(
        f"Heteroclinic: ‖f_c‖={norm_fc:.3e}, b(0) residual {residual:.2e}, "
        f"backward mismatch {mismatch:.2e}, tracking constant {tracking:.4g}"
    )
    return HeteroclinicOrbit(
        times=times,
        A=A_full,
        B=B_full,
        solution=sol,
        symmetry_residual=residual,
        backward_mismatch=mismatch,
        backward_window=float(backward_window),
        tracking_constant=tracking,
        target_plus=target,
        target_minus=apply_symmetry(target),
    )
