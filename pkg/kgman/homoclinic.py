#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import List, Optional, Tuple

import attr
import numba
import numpy as np

from kgman.core.params import ModelParams
from kgman.core.spectrum import Spectrum, spectrum_for
from kgman.core.state import State
from kgman.errors import EnergyDriftError
from kgman.evolve.scheme import composition_weights
from kgman.logging import logger

__all__ = [
    "HomoclinicOrbit",
    "alpha",
    "beta",
    "alpha_ddot",
    "homoclinic_state",
    "equilibria",
    "equilibrium_state",
    "planar_energy",
    "PlanarOrbit",
    "planar_orbit",
    "planar_first_return",
]


@attr.s(auto_attribs=True, frozen=True)
class HomoclinicOrbit(object):
    r"""The explicit orbit ``h(t) = (α(t), β(t))`` homoclinic to 0

    ``α(t) = m^{1/p}(p+1)^{1/(2p)} cosh(pmt)^{-1/p}`` and ``β = α̇``.
    Values are computed in the exponential form
    ``2^{1/p} e^{-m|t|}(1+e^{-2pm|t|})^{-1/p}`` so that no cosh overflows.
    """
    params: ModelParams

    @property
    def amplitude(self) -> float:
        m, p = self.params.m, self.params.p
        return m ** (1.0 / p) * (p + 1) ** (1.0 / (2 * p))

    def alpha(self, t):
        m, p = self.params.m, self.params.p
        s = np.abs(np.asarray(t, dtype=np.float64))
        return (
            self.amplitude
            * 2.0 ** (1.0 / p)
            * np.exp(-m * s)
            * (1.0 + np.exp(-2.0 * p * m * s)) ** (-1.0 / p)
        )

    def beta(self, t):
        m, p = self.params.m, self.params.p
        t = np.asarray(t, dtype=np.float64)
        return -m * self.alpha(t) * np.tanh(p * m * t)

    def beta_dot(self, t):
        r"""``α̈ = m²α - α^{2p+1}``"""
        m, p = self.params.m, self.params.p
        a = self.alpha(t)
        return m ** 2 * a - a ** (2 * p + 1)

    def state(self, t: float, spectrum: Optional[Spectrum] = None) -> State:
        if spectrum is None:
            spectrum = spectrum_for(self.params)
        return State.single_mode(
            spectrum.dim, 0, float(self.alpha(t)), float(self.beta(t))
        )


def alpha(t, params: ModelParams):
    return HomoclinicOrbit(params).alpha(t)


def beta(t, params: ModelParams):
    return HomoclinicOrbit(params).beta(t)


def alpha_ddot(t, params: ModelParams):
    return HomoclinicOrbit(params).beta_dot(t)


def homoclinic_state(
    t: float, params: ModelParams, spectrum: Optional[Spectrum] = None
) -> State:
    return HomoclinicOrbit(params).state(t, spectrum)


def equilibria(params: ModelParams) -> List[float]:
    r"""Space-independent equilibria ``{0, ±m^{1/p}}``"""
    a = params.m ** (1.0 / params.p)
    return [0.0, a, -a]


def equilibrium_state(
    sign: int, params: ModelParams, spectrum: Optional[Spectrum] = None
) -> State:
    if spectrum is None:
        spectrum = spectrum_for(params)
    a = float(np.sign(sign)) * params.m ** (1.0 / params.p)
    return State.single_mode(spectrum.dim, 0, a, 0.0)


def planar_energy(a0, b0, params: ModelParams):
    r"""``½(b_0² - m²a_0²) + a_0^{2p+2}/(2p+2)``"""
    p = params.p
    a0 = np.asarray(a0, dtype=np.float64)
    b0 = np.asarray(b0, dtype=np.float64)
    quadratic = 0.5 * (b0 ** 2 - params.m ** 2 * a0 ** 2)
    return quadratic + a0 ** (2 * p + 2) / (2 * p + 2)


@numba.njit(cache=True)
def _hyperbolic_flow(a, b, m, tau):
    c = np.cosh(m * tau)
    s = np.sinh(m * tau)
    return c * a + (s / m) * b, m * s * a + c * b


@numba.njit(cache=True)
def _planar_step(a, b, m, degree, dt, weights):
    for w in weights:
        h = w * dt
        a, b = _hyperbolic_flow(a, b, m, 0.5 * h)
        b -= h * a ** degree
        a, b = _hyperbolic_flow(a, b, m, 0.5 * h)
    return a, b


@numba.njit(cache=True)
def _planar_kernel(a, b, m, degree, dt, n_steps, weights, out_a, out_b):
    out_a[0] = a
    out_b[0] = b
    for k in range(n_steps):
        a, b = _planar_step(a, b, m, degree, dt, weights)
        out_a[k + 1] = a
        out_b[k + 1] = b


@numba.njit(cache=True)
def _planar_return_kernel(a, b, m, degree, dt, max_steps, weights, direction):
    for k in range(1, max_steps + 1):
        a_prev, b_prev = a, b
        a, b = _planar_step(a, b, m, degree, dt, weights)
        if direction * b_prev < 0.0 <= direction * b and a > 0.0:
            return k, a_prev, b_prev, a, b
    return -1, a, b, a, b


@attr.s(auto_attribs=True, frozen=True, eq=False)
class PlanarOrbit(object):
    r"""Sampled trajectory of the mode-0 system started at ``(η, 0)``"""
    eta: float
    times: np.ndarray
    a0: np.ndarray
    b0: np.ndarray
    energy: np.ndarray
    drift: float


def _energy_scale(a0: float, b0: float, params: ModelParams) -> float:
    e0 = abs(float(planar_energy(a0, b0, params)))
    ref = 0.5 * (b0 ** 2 + params.m ** 2 * a0 ** 2)
    return max(e0, ref, np.finfo(np.float64).tiny)


def planar_orbit(
    eta: float,
    params: ModelParams,
    T: float,
    dt: float,
    order: int = 2,
    drift_tolerance: float = 1e-6,
) -> PlanarOrbit:
    r"""Integrates ``ȧ_0 = b_0, ḃ_0 = m²a_0 - a_0^{2p+1}`` from ``(η, 0)``

    Uses the same splitting as the full integrator restricted to mode 0.

    Args:
        eta (float): Initial ``a_0``
        params (ModelParams): The model
        T (float): Final time, positive
        dt (float): Time step, positive
        order (int): 2 or 4
        drift_tolerance (float): Bound on the relative planar energy drift

    Returns:
        PlanarOrbit: Samples at every step
    """
    if dt <= 0 or T <= 0:
        raise ValueError(f"Need positive T and dt, got T={T!r}, dt={dt!r}")
    n_steps = max(1, int(round(T / dt)))
    h = T / n_steps
    out_a = np.empty(n_steps + 1)
    out_b = np.empty(n_steps + 1)
    _planar_kernel(
        float(eta),
        0.0,
        params.m,
        params.degree,
        h,
        n_steps,
        composition_weights(order),
        out_a,
        out_b,
    )
    times = h * np.arange(n_steps + 1)
    e = planar_energy(out_a, out_b, params)
    rel = np.abs(e - e[0]) / _energy_scale(float(eta), 0.0, params)
    bad = np.flatnonzero(rel > drift_tolerance)
    if len(bad):
        raise EnergyDriftError(
            float(times[bad[0]]), float(rel[bad[0]]), drift_tolerance
        )

    return PlanarOrbit(
        eta=float(eta),
        times=times,
        a0=out_a,
        b0=out_b,
        energy=e,
        drift=float(rel.max()),
    )


def planar_first_return(
    eta: float,
    params: ModelParams,
    dt: float = 1e-4,
    t_max: Optional[float] = None,
    order: int = 2,
) -> Tuple[float, float]:
    r"""First return of the orbit through ``(η, 0)`` to ``{b_0 = 0, a_0 > 0}``

    The crossing is taken in the same direction as the orbit leaves the
    section and is located by linear interpolation between steps.

    Returns:
        float: Return time (nan if no return before ``t_max``)
        float: ``a_0`` at the return
    """
    m, p = params.m, params.p
    direction = np.sign(m ** 2 * eta - eta ** (2 * p + 1))
    if direction == 0.0:
        return 0.0, float(eta)
    if t_max is None:
        t_max = 200.0 / m
    k, a_prev, b_prev, a, b = _planar_return_kernel(
        float(eta),
        0.0,
        m,
        params.degree,
        dt,
        int(np.ceil(t_max / dt)),
        composition_weights(order),
        float(direction),
    )
    if k < 0:
        logger.warning(f"No return of the eta={eta} orbit before t={t_max}")
        return float("nan"), float("nan")
    frac = b_prev / (b_prev - b)
    return (k - 1 + frac) * dt, a_prev + frac * (a - a_prev)
