#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Optional

import attr
import numpy as np

from kgman.core.params import ModelParams
from kgman.core.state import State
from kgman.errors import AdmissibilityError
from kgman.homoclinic import HomoclinicOrbit
from kgman.logging import logger
from kgman.manifolds.center import center_manifold_psi
from kgman.manifolds.center_stable import CenterStableSolution
from kgman.manifolds.truncation import TruncationConfig
from kgman.utils import fit_exponential_rate


@attr.s(auto_attribs=True, frozen=True, eq=False)
class ConvergenceReport(object):
    r"""Approach of a center-stable orbit to the center manifold

    Args:
        times (np.ndarray): Sample times in ``[t_ε, 2t_ε]``
        distances (np.ndarray): ``d(t) = |X_h(t) - Ψ(X_c(t))|``
        rate (float): Fitted decay rate of d
        prefactor (float): Fitted C in ``d ≈ C e^{-rate·t}``
        required_rate (float): The rate r of the configuration
        d_eps_ratio (float): ``d(t_ε)/ε²``
        passed (bool): Whether the fitted rate is at least r
    """
    times: np.ndarray
    distances: np.ndarray
    rate: float
    prefactor: float
    required_rate: float
    d_eps_ratio: float
    passed: bool


def convergence_to_Wc(
    sol: CenterStableSolution,
    params: ModelParams,
    cfg: Optional[TruncationConfig] = None,
    samples: int = 12,
    psi_horizon: Optional[float] = None,
) -> ConvergenceReport:
    r"""Fits the decay of the distance from ``X(t)`` to the center manifold

    At late times ``t ∈ [t_ε, min(2t_ε, T)]`` the candidate manifold point
    is ``(Ψ(X_c(t)), X_c(t))``; its distance to ``X(t) = Z(t) + h(t)`` is
    the hyperbolic gap ``|X_h(t) - Ψ(X_c(t))|``. A nonpositive or too slow
    fitted rate is reported, not raised.

    Args:
        sol (CenterStableSolution): Solution valid up to at least 2t_ε
        params (ModelParams): The model
        cfg (Optional[TruncationConfig]): Defaults to the solution's
        samples (int): Number of late times
        psi_horizon (Optional[float]): Window half-length of each Ψ solve,
            default ``20/m``
    """
    if cfg is None:
        cfg = sol.cfg
    times = sol.times
    if times[-1] < 2.0 * cfg.t_eps * (1.0 - 1e-12):
        raise AdmissibilityError(
            f"Solution ends at {times[-1]:g}, before 2t_ε = {2.0 * cfg.t_eps:g}"
        )
    if psi_horizon is None:
        psi_horizon = 20.0 / params.m
    psi_cfg = attr.evolve(cfg, T_horizon=psi_horizon)

    targets = np.linspace(cfg.t_eps, min(2.0 * cfg.t_eps, times[-1]), samples)
    orbit = HomoclinicOrbit(params)
    sample_times = np.empty(samples)
    distances = np.empty(samples)
    for k, t in enumerate(targets):
        i = sol.Z_traj.index_of(t)
        sample_times[k] = times[i]
        Z = sol.Z_traj.state(i)
        a = Z.a.copy()
        b = Z.b.copy()
        a[0] = 0.0
        b[0] = 0.0
        psi = center_manifold_psi(State(a, b), params, psi_cfg)
        xh_a = Z.a[0] + float(orbit.alpha(times[i]))
        xh_b = Z.b[0] + float(orbit.beta(times[i]))
        distances[k] = np.hypot(xh_a - psi.a0, xh_b - psi.b0)

    slope, prefactor = fit_exponential_rate(sample_times, distances)
    rate = -slope
    passed = bool(np.isfinite(rate) and rate > 0 and rate >= cfg.r)
    report = ConvergenceReport(
        times=sample_times,
        distances=distances,
        rate=float(rate),
        prefactor=float(prefactor),
        required_rate=cfg.r,
        d_eps_ratio=float(distances[0] / cfg.epsilon ** 2),
        passed=passed,
    )
    if passed:
        logger.info(f"Convergence to W^c: rate {rate:.4g} ≥ r = {cfg.r:.4g}")
    else:
        logger.warning(f"Convergence to W^c: rate {rate:.4g} below r = {cfg.r:.4g}")
    return report
