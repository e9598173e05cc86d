#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import math
from typing import Callable, Optional, Tuple

import attr
import numpy as np
from scipy.optimize import brentq

from kgman.core.params import ModelParams
from kgman.errors import CertificateError
from kgman.logging import logger

# each interior segment of the partition carries this much of ∫|q|
SEGMENT_MASS = 0.5


def _one_minus_tanh(x):
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-2.0 * np.abs(x))
    return np.where(x >= 0, 2.0 * e / (1.0 + e), 1.0 - np.tanh(x))


def potential_integral(
    params: ModelParams,
) -> Tuple[Callable[[float], float], float]:
    r"""Closed-form partial integrals of ``q = (2p+1)α^{2p}`` on the half-line

    With ``α^{2p} = (p+1)m² sech²(pmt)``,
    ``∫_0^t q = (2p+1)(p+1)m·tanh(pmt)/p``.

    Returns:
        Callable[[float], float]: ``t ↦ ∫_0^t q`` for t ≥ 0
        float: ``∫_0^∞ q``
    """
    m, p = params.m, params.p
    scale = params.degree * (p + 1) * m / p

    def partial(t):
        return scale * np.tanh(p * m * np.asarray(t, dtype=np.float64))

    return partial, scale


def alpha_power_tail(T, params: ModelParams):
    r"""``∫_T^∞ α^{2p} = (p+1)m(1 - tanh(pmT))/p``, accurate for large T"""
    m, p = params.m, params.p
    return (p + 1) * m / p * _one_minus_tanh(p * m * np.asarray(T))


@attr.s(auto_attribs=True, frozen=True)
class Certificate(object):
    r"""Boundedness certificate for ``ẍ + ω²x = q(t)x``-type perturbations

    Args:
        k (int): Number of interior partition times
        bound (float): Certified bound ``2^{k+1}`` on the growth of the norm
        partition (Tuple[float, ...]): ``T_1 < ... < T_k``
        total (float): ``∫_0^∞ |q|`` after frequency scaling
        omega (Optional[float]): Frequency used to scale q, if any
    """
    k: int
    bound: float
    partition: Tuple[float, ...] = ()
    total: float = 0.0
    omega: Optional[float] = None

    def __iter__(self):
        # unpacks as (k, bound)
        return iter((self.k, self.bound))


def boundedness_certificate(
    q_integral_fn: Optional[Callable[[float], float]],
    q_total: Optional[float],
    params: ModelParams,
    omega: Optional[float] = None,
) -> Certificate:
    r"""Certified bound on the growth of bounded-perturbation solutions

    The half-line is cut at times where the running integral of |q| reaches
    ``½, 1, 3/2, ...``; each of the k interior segments and the final tail
    (which carries at most ½) at most doubles the norm
    ``‖x, y‖ = (ω²x² + y²)^{1/2}``, giving the bound ``2^{k+1}``.

    Args:
        q_integral_fn (Optional[Callable]): ``t ↦ ∫_0^t |q|``, nondecreasing;
            None uses the homoclinic potential
        q_total (Optional[float]): ``∫_0^∞ |q|``
        params (ModelParams): The model, used for the default q and the time
            scale of the root brackets
        omega (Optional[float]): When given, q is measured relative to the
            frequency (divided by ω)

    Returns:
        Certificate: ``(k, bound)`` with the partition times

    Raises:
        CertificateError: If q_total is not finite and nonnegative
    """
    if q_integral_fn is None:
        q_integral_fn, default_total = potential_integral(params)
        if q_total is None:
            q_total = default_total
    if q_total is None or not np.isfinite(q_total) or q_total < 0:
        raise CertificateError(
            f"∫|q| must be finite and nonnegative, got {q_total!r}"
        )

    scale = 1.0
    if omega is not None:
        if not omega > 0:
            raise CertificateError(f"Frequency must be positive, got {omega!r}")
        scale = 1.0 / omega
    total = scale * float(q_total)

    def running(t):
        return scale * float(q_integral_fn(t))

    k = max(0, math.ceil(total / SEGMENT_MASS - 1e-12) - 1)
    partition = []
    lo = 0.0
    for j in range(1, k + 1):
        target = j * SEGMENT_MASS
        hi = max(lo, 1.0 / params.m)
        while running(hi) < target:
            hi *= 2.0
            if hi > 1e12:
                raise CertificateError(
                    f"Running integral never reaches {target} (total {total})"
                )
        lo = brentq(lambda t: running(t) - target, lo, hi, xtol=1e-14)
        partition.append(lo)

    bound = 2.0 ** (k + 1)
    logger.info(f"Certificate: ∫|q|={total:.6g}, k={k}, bound={bound:g}")
    return Certificate(
        k=k, bound=bound, partition=tuple(partition), total=total, omega=omega
    )
