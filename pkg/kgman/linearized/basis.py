#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Dict, Optional, Tuple

import attr
import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp

from kgman.core.params import ModelParams
from kgman.errors import WronskianDriftError
from kgman.homoclinic import HomoclinicOrbit
from kgman.logging import logger
from kgman.utils import fit_exponential_rate, uniform_grid

ODE_RTOL = 1e-13
ODE_ATOL = 1e-15
# short steps keep the growing solution accurate to rounding level
ODE_MAX_STEP = 0.1


def hyperbolic_potential(t, params: ModelParams):
    r"""``(2p+1)α(t)^{2p}``, the potential seen by every linearized mode"""
    a = HomoclinicOrbit(params).alpha(t)
    return params.degree * a ** (2 * params.p)


def _pairing(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", u, v)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class HyperbolicBasis(object):
    r"""Fundamental pair of the linearized mode-0 equation and its duals

    The mode-0 deviation solves ``ȧ = b, ḃ = m²a - (2p+1)α(t)^{2p}a``. The
    decaying solution σ and the growing solution ρ are sampled on a uniform
    grid starting at 0, with ``σ(0) = (0, 1)`` and ``ρ(0) = (1, 0)``. The
    duals are the rows of ``[σ ρ]^{-1}`` so that ``⟨σ, σ*⟩ = ⟨ρ, ρ*⟩ = 1``
    and the cross pairings vanish.

    Args:
        params (ModelParams): The model
        times (np.ndarray): Sample times, ``times[0] = 0``
        sigma (np.ndarray): ``(n, 2)`` samples of σ
        rho (np.ndarray): ``(n, 2)`` samples of ρ
        sigma_star (np.ndarray): ``(n, 2)`` samples of σ*
        rho_star (np.ndarray): ``(n, 2)`` samples of ρ*
        wronskian (float): ``det[σ ρ]`` at t = 0
        wronskian_drift (float): Largest deviation of ``det[σ ρ]`` from it
        constants (Dict[str, float]): Fitted C in the bounds
            ``|σ|, |ρ*| ≤ C e^{-mt}`` and ``|ρ|, |σ*| ≤ C e^{mt}``
    """
    params: ModelParams
    times: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    sigma_star: np.ndarray
    rho_star: np.ndarray
    wronskian: float
    wronskian_drift: float
    constants: Dict[str, float] = attr.ib(factory=dict)

    @property
    def T_max(self) -> float:
        return float(self.times[-1])

    def stable_coefficient(self, Zh: np.ndarray) -> np.ndarray:
        r"""``⟨Z_h(t), σ*(t)⟩`` for ``(n, 2)`` samples on the basis grid"""
        return _pairing(Zh, self.sigma_star)

    def unstable_coefficient(self, Zh: np.ndarray) -> np.ndarray:
        r"""``⟨Z_h(t), ρ*(t)⟩`` for ``(n, 2)`` samples on the basis grid"""
        return _pairing(Zh, self.rho_star)

    def duals_at(self, t) -> Tuple[np.ndarray, np.ndarray]:
        r"""σ* and ρ* linearly interpolated at arbitrary times in the grid range"""
        t = np.asarray(t, dtype=np.float64)
        ss = np.stack(
            [np.interp(t, self.times, self.sigma_star[:, i]) for i in range(2)],
            axis=-1,
        )
        rs = np.stack(
            [np.interp(t, self.times, self.rho_star[:, i]) for i in range(2)],
            axis=-1,
        )
        return ss, rs

    def duality_defect(self) -> float:
        r"""Largest biorthogonality defect of ``(σ, ρ)`` against ``(σ*, ρ*)``

        ``|⟨σ,σ*⟩-1| + |⟨σ,ρ*⟩| + |⟨ρ,ρ*⟩-1| + |⟨ρ,σ*⟩|`` over the grid.
        """
        defect = (
            np.abs(_pairing(self.sigma, self.sigma_star) - 1.0)
            + np.abs(_pairing(self.sigma, self.rho_star))
            + np.abs(_pairing(self.rho, self.rho_star) - 1.0)
            + np.abs(_pairing(self.rho, self.sigma_star))
        )
        return float(defect.max())

    def growth_rate(self, t0: Optional[float] = None, t1: Optional[float] = None):
        r"""Log-linear fit of ``|ρ(t)|`` over ``[t0, t1]`` (default ``[5/m, 15/m]``)"""
        m = self.params.m
        t0 = 5.0 / m if t0 is None else t0
        t1 = min(15.0 / m if t1 is None else t1, self.T_max)
        keep = (self.times >= t0) & (self.times <= t1)
        rate, _ = fit_exponential_rate(
            self.times[keep], np.linalg.norm(self.rho[keep], axis=1)
        )
        return rate


def sigma_path(times: np.ndarray, params: ModelParams) -> np.ndarray:
    r"""Closed-form decaying solution ``μ(β, β̇)``

    ``μ = 1/β̇(0) = -1/(pm²α(0))`` normalizes the second (velocity) component,
    so ``σ(0) = (0, 1)``.
    """
    orbit = HomoclinicOrbit(params)
    mu = 1.0 / float(orbit.beta_dot(0.0))
    return mu * np.column_stack([orbit.beta(times), orbit.beta_dot(times)])


def rho_path(times: np.ndarray, params: ModelParams) -> np.ndarray:
    r"""Growing solution from ``(1, 0)``, integrated with DOP853"""
    m2 = params.m ** 2

    def rhs(t, y):
        return [y[1], (m2 - hyperbolic_potential(t, params)) * y[0]]

    sol = solve_ivp(
        rhs,
        (float(times[0]), float(times[-1])),
        [1.0, 0.0],
        method="DOP853",
        t_eval=times,
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        max_step=ODE_MAX_STEP,
    )
    if not sol.success:
        raise RuntimeError(f"Integration of the growing solution failed: {sol.message}")
    return sol.y.T.copy()


def _fit_constant(times, values, rate):
    return float(np.max(np.linalg.norm(values, axis=1) * np.exp(-rate * times)))


def hyperbolic_basis(
    params: ModelParams,
    T_max: float,
    dt: float = 1e-2,
    wronskian_tol: float = 1e-10,
) -> HyperbolicBasis:
    r"""Samples σ, ρ, σ* and ρ* on ``[0, T_max]``

    Args:
        params (ModelParams): The model
        T_max (float): Right end of the grid, positive
        dt (float): Grid spacing (adjusted so the grid ends at T_max)
        wronskian_tol (float): Allowed drift of ``det[σ ρ]``

    Returns:
        HyperbolicBasis: The sampled basis

    Raises:
        WronskianDriftError: If ``det[σ ρ]`` is not constant to wronskian_tol
    """
    if not T_max > 0:
        raise ValueError(f"T_max must be positive, got {T_max!r}")
    times = uniform_grid(0.0, T_max, dt)
    sigma = sigma_path(times, params)
    rho = rho_path(times, params)

    det = sigma[:, 0] * rho[:, 1] - sigma[:, 1] * rho[:, 0]
    wronskian = float(det[0])
    drift = float(np.max(np.abs(det - wronskian)))
    if drift > wronskian_tol:
        raise WronskianDriftError(
            f"det[σ ρ] drifts by {drift:.3e} (tolerance {wronskian_tol:.1e}) on "
            f"[0, {T_max}]; the integration is not accurate enough"
        )

    sigma_star = np.column_stack([rho[:, 1], -rho[:, 0]]) / det[:, None]
    rho_star = np.column_stack([-sigma[:, 1], sigma[:, 0]]) / det[:, None]

    m = params.m
    constants = {
        "sigma": _fit_constant(times, sigma, -m),
        "rho": _fit_constant(times, rho, m),
        "sigma_star": _fit_constant(times, sigma_star, m),
        "rho_star": _fit_constant(times, rho_star, -m),
    }
    logger.info(
        f"Hyperbolic basis on [0, {T_max:g}]: W={wronskian:.12g}, "
        f"drift={drift:.2e}, C={max(constants.values()):.4g}"
    )
    return HyperbolicBasis(
        params=params,
        times=times,
        sigma=sigma,
        rho=rho,
        sigma_star=sigma_star,
        rho_star=rho_star,
        wronskian=wronskian,
        wronskian_drift=drift,
        constants=constants,
    )


def rho_by_reduction(basis: HyperbolicBasis, t_ref: float = 1.0) -> np.ndarray:
    r"""Growing solution rebuilt by reduction of order from σ

    On ``[t_ref, T_max]`` (where β does not vanish) the second solution is
    ``γ = β·z`` with ``β²ż = c`` constant; matching ρ at t_ref gives the
    cross-check for the integrated path.

    Returns:
        np.ndarray: ``(n, 2)`` samples on ``basis.times``, nan before t_ref
    """
    params = basis.params
    orbit = HomoclinicOrbit(params)
    times = basis.times
    i0 = int(np.searchsorted(times, t_ref))
    t = times[i0:]
    b = orbit.beta(t)
    bd = orbit.beta_dot(t)
    r0 = basis.rho[i0]
    c = b[0] * r0[1] - bd[0] * r0[0]

    z = r0[0] / b[0] + c * cumulative_simpson(1.0 / b ** 2, x=t, initial=0.0)
    out = np.full_like(basis.rho, np.nan)
    out[i0:, 0] = b * z
    out[i0:, 1] = bd * z + c / b
    return out
