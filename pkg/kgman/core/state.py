#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Optional

import attr
import numpy as np

from kgman.core.spectrum import Spectrum


def _as_vector(value) -> np.ndarray:
    out = np.array(value, dtype=np.float64)
    out.setflags(write=False)
    return out


@attr.s(auto_attribs=True, frozen=True, eq=False, slots=True)
class State(object):
    r"""Phase-space point ``(a_n, b_n)``, the discrete ``(u, ∂_t u)``

    Arrays are copied on construction and made read-only.

    Args:
        a (np.ndarray): Position coefficients, one per spectrum entry
        b (np.ndarray): Momentum coefficients
    """
    a: np.ndarray = attr.ib(converter=_as_vector)
    b: np.ndarray = attr.ib(converter=_as_vector)

    def __attrs_post_init__(self):
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise ValueError(
                f"a and b must be vectors of equal length, got {self.a.shape} "
                f"and {self.b.shape}"
            )

    @classmethod
    def zeros(cls, dim: int) -> "State":
        return cls(np.zeros(dim), np.zeros(dim))

    @classmethod
    def single_mode(
        cls, dim: int, n: int, a: float = 0.0, b: float = 0.0
    ) -> "State":
        av = np.zeros(dim)
        bv = np.zeros(dim)
        av[n] = a
        bv[n] = b
        return cls(av, bv)

    @property
    def dim(self) -> int:
        return len(self.a)

    def __add__(self, other: "State") -> "State":
        return State(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "State") -> "State":
        return State(self.a - other.a, self.b - other.b)

    def __mul__(self, scale: float) -> "State":
        return State(scale * self.a, scale * self.b)

    __rmul__ = __mul__

    def __neg__(self) -> "State":
        return State(-self.a, -self.b)

    def __eq__(self, other):
        return (
            isinstance(other, State)
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    def allclose(self, other: "State", atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.a, other.a, rtol=0.0, atol=atol)
            and np.allclose(self.b, other.b, rtol=0.0, atol=atol)
        )


@attr.s(auto_attribs=True, frozen=True, slots=True)
class HyperbolicPoint(object):
    r"""Point of the ``(a_0, b_0)`` plane"""
    a0: float = 0.0
    b0: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.b0])

    def norm(self) -> float:
        return float(np.hypot(self.a0, self.b0))


def project_h(X: State) -> HyperbolicPoint:
    return HyperbolicPoint(float(X.a[0]), float(X.b[0]))


def project_c(X: State) -> State:
    a = X.a.copy()
    b = X.b.copy()
    a[0] = 0.0
    b[0] = 0.0
    return State(a, b)


def embed_h(point: HyperbolicPoint, dim: int) -> State:
    r"""State carrying ``point`` on mode 0 and nothing elsewhere"""
    return State.single_mode(dim, 0, point.a0, point.b0)


def apply_symmetry(X: State) -> State:
    r"""Reversing symmetry ``S(a, b) = (a, -b)``"""
    return State(X.a, -X.b)


def state_norm(X: State, spectrum: Spectrum) -> float:
    r"""h¹×ℓ² norm ``(Σ(1+λ_n²)a_n² + Σb_n²)^{1/2}``"""
    return float(np.sqrt(np.sum((1.0 + spectrum.lam ** 2) * X.a ** 2 + X.b ** 2)))


def state_norms(a: np.ndarray, b: np.ndarray, lam: np.ndarray) -> np.ndarray:
    r"""Row-wise h¹×ℓ² norms of stacked coefficient arrays"""
    return np.sqrt(np.sum((1.0 + lam ** 2) * a ** 2 + b ** 2, axis=-1))


def center_norms(a: np.ndarray, b: np.ndarray, lam: np.ndarray) -> np.ndarray:
    r"""Row-wise h¹×ℓ² norms of the elliptic part (mode 0 ignored)"""
    w = (1.0 + lam[1:] ** 2) * a[..., 1:] ** 2 + b[..., 1:] ** 2
    return np.sqrt(np.sum(w, axis=-1))


def mode_norm(z: np.ndarray, lam: float, m: float) -> float:
    r"""Energy norm ``((λ²-m²)x² + y²)^{1/2}`` of an elliptic mode"""
    x, y = z
    return float(np.sqrt((lam ** 2 - m ** 2) * x ** 2 + y ** 2))


def random_state(
    spectrum: Spectrum,
    amplitude: float = 1.0,
    decay: float = 1.0,
    rng: Optional[np.random.Generator] = None,
) -> State:
    r"""Random state with coefficients scaled by ``(1+λ_n²)^{-decay}``

    Args:
        spectrum (Spectrum): The basis
        amplitude (float): Overall scale of the coefficients
        decay (float): Smoothness exponent
        rng (Optional[np.random.Generator]): Source of randomness
    """
    if rng is None:
        rng = np.random.default_rng(0)
    weight = amplitude * (1.0 + spectrum.lam ** 2) ** (-decay)
    return State(
        weight * rng.standard_normal(spectrum.dim),
        weight * rng.standard_normal(spectrum.dim),
    )
