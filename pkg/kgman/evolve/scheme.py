#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Callable, Dict, Optional, Tuple

import attr
import numpy as np

from kgman.core.functionals import nonlinear_force
from kgman.core.params import ModelParams
from kgman.core.spectrum import spectrum_for
from kgman.core.state import State

# force(a, b, t) -> ḃ contribution of the kick
KickForce = Callable[[np.ndarray, np.ndarray, float], np.ndarray]

# Triple-jump weights lifting a symmetric order-2 step to order 4
_CBRT2 = 2.0 ** (1.0 / 3.0)
TRIPLE_JUMP = np.array(
    [1.0 / (2.0 - _CBRT2), -_CBRT2 / (2.0 - _CBRT2), 1.0 / (2.0 - _CBRT2)]
)
STRANG = np.array([1.0])


def composition_weights(order: int) -> np.ndarray:
    if order == 2:
        return STRANG
    if order == 4:
        return TRIPLE_JUMP
    raise ValueError(f"Only orders 2 and 4 are available, got {order!r}")


@attr.s(auto_attribs=True, frozen=True, slots=True)
class SchemeConfig(object):
    r"""Splitting scheme settings

    Args:
        order (int): 2 (Strang) or 4 (triple jump of Strang steps)
        dt (float): Positive time step
        drift_tolerance (float): Bound on the relative energy drift
    """
    order: int = attr.ib(default=2)
    dt: float = attr.ib(default=1e-3)
    drift_tolerance: float = attr.ib(default=1e-6)

    @order.validator
    def _check_order(self, attribute, value):
        if value not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {value!r}")

    @dt.validator
    def _check_dt(self, attribute, value):
        if not value > 0:
            raise ValueError(f"dt must be positive, got {value!r}")

    @drift_tolerance.validator
    def _check_tolerance(self, attribute, value):
        if not value > 0:
            raise ValueError(f"drift_tolerance must be positive, got {value!r}")


def _cosh_sinh(x):
    # exponential forms stay finite as long as e^{|x|} does
    ax = np.abs(x)
    grow = 0.5 * np.exp(ax)
    decay = np.exp(-2.0 * ax)
    return grow * (1.0 + decay), np.sign(x) * grow * -np.expm1(-2.0 * ax)


def linear_coefficients(
    lam: np.ndarray, m: float, tau
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    r"""Entries of the exact flow matrix of ``Ẋ = ΛX`` per mode

    Mode 0 (λ = 0) gets ``[[cosh, sinh/m], [m sinh, cosh]](mτ)``, every
    elliptic mode the rotation ``[[cos, sin/ω], [-ω sin, cos]](ωτ)`` with
    ``ω = (λ² - m²)^{1/2}``.

    Args:
        lam (np.ndarray): Frequencies of the spectrum
        m (float): Mass
        tau: Scalar time or array of times; a trailing spectrum axis is added

    Returns:
        Four arrays ``c11, c12, c21, c22`` broadcast to ``tau.shape + lam.shape``
    """
    tau = np.asarray(tau, dtype=np.float64)[..., None]
    hyperbolic = lam == 0.0
    omega = np.sqrt(np.where(hyperbolic, 1.0, lam ** 2 - m ** 2))

    cos = np.cos(omega * tau)
    sin = np.sin(omega * tau)
    ch, sh = _cosh_sinh(m * tau)

    c11 = np.where(hyperbolic, ch, cos)
    c12 = np.where(hyperbolic, sh / m, sin / omega)
    c21 = np.where(hyperbolic, m * sh, -omega * sin)
    c22 = c11
    return c11, c12, c21, c22


def apply_linear(a, b, coeffs):
    c11, c12, c21, c22 = coeffs
    return c11 * a + c12 * b, c21 * a + c22 * b


def linear_flow(X: State, t: float, params: ModelParams) -> State:
    r"""Exact solution of ``Ẋ = ΛX`` at time t"""
    lam = spectrum_for(params).lam
    a, b = apply_linear(X.a, X.b, linear_coefficients(lam, params.m, t))
    return State(a, b)


@attr.s(auto_attribs=True)
class Stepper(object):
    r"""Time-symmetric splitting stepper

    One step of size dt is ``L(dt/2) ∘ kick(dt) ∘ L(dt/2)``, where L is the
    exact linear flow and the kick adds ``dt·force`` to b, evaluated at the
    midpoint time. Order 4 composes three such steps with triple-jump weights.
    States are handled as raw coefficient arrays so batches of states (extra
    leading axes) step together.

    Args:
        params (ModelParams): The model
        scheme (SchemeConfig): Order and step
        force (Optional[KickForce]): Kick ``force(a, b, t)``; defaults to the
            Klein-Gordon nonlinearity ``-u^{2p+1}``
    """
    params: ModelParams
    scheme: SchemeConfig
    force: Optional[KickForce] = None
    _flows: Dict[float, tuple] = attr.ib(factory=dict, init=False, repr=False)
    _lam: np.ndarray = attr.ib(default=None, init=False, repr=False)
    _weights: np.ndarray = attr.ib(default=None, init=False, repr=False)

    def __attrs_post_init__(self):
        self._lam = spectrum_for(self.params).lam
        self._weights = composition_weights(self.scheme.order)

    @property
    def autonomous(self) -> bool:
        return self.force is None

    def _flow(self, tau: float):
        coeffs = self._flows.get(tau)
        if coeffs is None:
            coeffs = linear_coefficients(self._lam, self.params.m, tau)
            self._flows[tau] = coeffs
        return coeffs

    def rate(self, a: np.ndarray, b: np.ndarray, t) -> np.ndarray:
        if self.force is None:
            return nonlinear_force(a, self.params)
        return self.force(a, b, t)

    def step(self, a: np.ndarray, b: np.ndarray, t, dt: Optional[float] = None):
        r"""Advances ``(a, b)`` from time t by dt (default ``scheme.dt``, may be < 0)"""
        if dt is None:
            dt = self.scheme.dt
        for w in self._weights:
            h = w * dt
            half = self._flow(0.5 * h)
            a, b = apply_linear(a, b, half)
            b = b + h * self.rate(a, b, t + 0.5 * h)
            a, b = apply_linear(a, b, half)
            t = t + h
        return a, b


def step(
    X: State,
    params: ModelParams,
    scheme: SchemeConfig,
    t: float = 0.0,
    reverse: bool = False,
    force: Optional[KickForce] = None,
) -> State:
    r"""One scheme step of ``scheme.dt`` (``-scheme.dt`` when ``reverse``)"""
    stepper = Stepper(params, scheme, force)
    dt = -scheme.dt if reverse else scheme.dt
    a, b = stepper.step(X.a, X.b, t, dt)
    return State(a, b)
