#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import Optional

import attr
import numpy as np
from scipy.special import comb

from kgman.core.params import ModelParams
from kgman.core.spectrum import grid_for, spectrum_for
from kgman.core.state import State, center_norms
from kgman.evolve.scheme import KickForce
from kgman.homoclinic import HomoclinicOrbit


def cutoff_theta(s, delta: float):
    r"""Cutoff equal to 1 on ``[0, δ]`` and 0 on ``[2δ, ∞)``

    In between it is ``1 - x²(3 - 2x)`` with ``x = (s - δ)/δ``, a C¹
    smoothstep taking the value ½ at ``s = 1.5δ``.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    x = np.clip((np.asarray(s, dtype=np.float64) - delta) / delta, 0.0, 1.0)
    return 1.0 - x * x * (3.0 - 2.0 * x)


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"{attribute.name} must be positive, got {value!r}")


@attr.s(auto_attribs=True, frozen=True)
class TruncationConfig(object):
    r"""Scales of the cutoff-truncated constructions around the homoclinic

    Use :py:meth:`build` to derive δ, r, t_ε and the horizon from ε and the
    mass; direct construction checks the relations that do not need m and
    :py:meth:`validate` checks the rest.

    Args:
        epsilon (float): Amplitude scale, ``0 < ε < 1``; center-stable data
            have size at most ε²
        delta (float): Cutoff radius, ``δ = ε^{3/2}``
        r (float): Decay rate, ``0 < r < m``
        t_eps (float): Window time ``(4/m)·ln(1/ε)``
        T_horizon (float): Finite integration horizon
        fp_tol (float): Picard stopping tolerance on the sup-norm update
        shoot_tol (float): Bisection width at which shooting stops
        dt (float): Time step of solver grids and integrations
        max_iter (int): Picard iteration limit
        center_radius (Optional[float]): Radius of the admissible center ball
            for the center manifold; defaults to δ
    """
    epsilon: float = attr.ib(validator=_positive)
    delta: float = attr.ib(validator=_positive)
    r: float = attr.ib(validator=_positive)
    t_eps: float = attr.ib(validator=_positive)
    T_horizon: float = attr.ib(validator=_positive)
    fp_tol: float = attr.ib(default=1e-9, validator=_positive)
    shoot_tol: float = attr.ib(default=1e-20, validator=_positive)
    dt: float = attr.ib(default=1e-2, validator=_positive)
    max_iter: int = attr.ib(default=50)
    center_radius: Optional[float] = attr.ib(default=None)

    def __attrs_post_init__(self):
        if not self.epsilon < 1:
            raise ValueError(f"epsilon must be below 1, got {self.epsilon!r}")
        if not math.isclose(self.delta, self.epsilon ** 1.5, rel_tol=1e-12):
            raise ValueError(
                f"delta must equal epsilon^(3/2) = {self.epsilon ** 1.5!r}, "
                f"got {self.delta!r}"
            )
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(
                f"max_iter must be a positive integer, got {self.max_iter!r}"
            )
        if self.center_radius is None:
            object.__setattr__(self, "center_radius", self.delta)
        elif not self.center_radius > 0:
            raise ValueError(
                f"center_radius must be positive, got {self.center_radius!r}"
            )

    @staticmethod
    def window_time(epsilon: float, m: float) -> float:
        return 4.0 / m * math.log(1.0 / epsilon)

    @classmethod
    def build(
        cls,
        params: ModelParams,
        epsilon: float,
        r: Optional[float] = None,
        T_horizon: Optional[float] = None,
        **kwargs,
    ) -> "TruncationConfig":
        r"""Derives the scales from ε and the mass

        Defaults: ``r = m/2`` and ``T_horizon = max(2t_ε, 40/m)``.
        """
        m = params.m
        t_eps = cls.window_time(epsilon, m)
        cfg = cls(
            epsilon=epsilon,
            delta=epsilon ** 1.5,
            r=0.5 * m if r is None else r,
            t_eps=t_eps,
            T_horizon=max(2.0 * t_eps, 40.0 / m) if T_horizon is None else T_horizon,
            **kwargs,
        )
        cfg.validate(params)
        return cfg

    def validate(self, params: ModelParams):
        r"""Checks the relations involving the mass"""
        if not self.r < params.m:
            raise ValueError(f"r must lie in (0, m) = (0, {params.m}), got {self.r!r}")
        expected = self.window_time(self.epsilon, params.m)
        if not math.isclose(self.t_eps, expected, rel_tol=1e-12):
            raise ValueError(
                f"t_eps must equal (4/m)ln(1/epsilon) = {expected!r}, "
                f"got {self.t_eps!r}"
            )

    @property
    def steps(self) -> int:
        return max(1, int(round(self.T_horizon / self.dt)))


def _alpha_column(alpha, ndim: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.float64)
    return alpha.reshape(alpha.shape + (1,) * ndim)


def _theta_scale(a, b, params, cfg, cutoff):
    if not cutoff:
        return np.ones(np.shape(a)[:-1])
    lam = spectrum_for(params).lam
    return cutoff_theta(center_norms(a, b, lam), cfg.delta)


def remainder_force(a, b, alpha, params: ModelParams, cfg, cutoff: bool = True):
    r"""b-part of ``𝒩(θZ)`` for stacked deviations around the homoclinic

    ``𝒩(Z) = F(Z+h) - F(h) - dF[h]Z`` has b-coefficients
    ``-⟨Σ_{j≥2} C(2p+1, j) α^{2p+1-j} u_Z^j, e_n⟩``. The terms of degree
    j ≥ 2 are summed directly so the small remainder is not obtained by
    cancellation. θ is evaluated at the center norm of Z.

    Args:
        a (np.ndarray): Position coefficients of Z, trailing spectrum axis
        b (np.ndarray): Momentum coefficients of Z
        alpha: ``α(t)`` per batch entry (scalar or array of the batch shape)
        params (ModelParams): The model
        cfg (TruncationConfig): Supplies δ
        cutoff (bool): False drops θ
    """
    a = np.asarray(a, dtype=np.float64)
    grid = grid_for(params)
    theta = _theta_scale(a, b, params, cfg, cutoff)
    u = grid.synthesize(np.asarray(theta)[..., None] * a)
    alpha = _alpha_column(np.broadcast_to(alpha, theta.shape), grid.spectrum.ndim)

    degree = params.degree
    total = np.zeros_like(u)
    power = u * u
    for j in range(2, degree + 1):
        total += comb(degree, j, exact=True) * alpha ** (degree - j) * power
        power = power * u
    return -grid.analyze(total)


def truncated_N(Z: State, h_t: State, params: ModelParams, cfg) -> State:
    r"""Cutoff remainder ``𝒩(θ(‖Z_c‖)Z)`` at the homoclinic point ``h_t``"""
    force = remainder_force(Z.a, Z.b, h_t.a[0], params, cfg)
    return State(np.zeros(Z.dim), force)


def truncated_F_force(a, b, params: ModelParams, cfg, cutoff: bool = True):
    r"""b-part of ``F(θ(‖X_c‖)X)`` for stacked states near the origin"""
    a = np.asarray(a, dtype=np.float64)
    theta = _theta_scale(a, b, params, cfg, cutoff)
    grid = grid_for(params)
    u = grid.synthesize(np.asarray(theta)[..., None] * a)
    return -grid.analyze(u ** params.degree)


def z_force(params: ModelParams, cfg, cutoff: bool = True) -> KickForce:
    r"""Kick of the deviation system ``Ż = ΛZ + dF[h(t)]Z + 𝒩(θZ)``

    The linear part Λ is handled by the stepper; the kick returns
    ``-(2p+1)α(t)^{2p}Z_a + 𝒩_b(θZ)``. Without the cutoff this is exactly
    ``F(Z+h) - F(h)``.
    """
    orbit = HomoclinicOrbit(params)
    two_p = 2 * params.p

    def force(a, b, t):
        alpha = orbit.alpha(t)
        linear = params.degree * _alpha_column(alpha, 1) ** two_p * a
        return -linear + remainder_force(a, b, alpha, params, cfg, cutoff)

    return force


def truncated_x_force(params: ModelParams, cfg, cutoff: bool = True) -> KickForce:
    r"""Kick ``F(θ(‖X_c‖)X)`` of the truncated system around the origin"""

    def force(a, b, t):
        return truncated_F_force(a, b, params, cfg, cutoff)

    return force
