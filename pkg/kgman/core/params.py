#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import attr

from kgman.errors import SpectrumError

MANIFOLD_KINDS = ("circle", "torus2")

# Smallest nonzero Laplacian frequency of every supported manifold
FIRST_FREQUENCY = {"circle": 1.0, "torus2": 1.0}


@attr.s(auto_attribs=True, frozen=True, slots=True)
class ModelParams(object):
    r"""Parameters of the Klein-Gordon model ``u_tt - Δu - m²u + u^{2p+1} = 0``

    Args:
        m (float): Mass, must satisfy 0 < m < λ_1
        p (int): Nonlinearity exponent, p ≥ 1
        N (int): Mode cutoff (largest frequency kept)
        manifold (str): ``circle`` or ``torus2``
    """
    m: float = 0.5
    p: int = attr.ib(default=1)
    N: int = attr.ib(default=8)
    manifold: str = attr.ib(default="circle")

    @manifold.validator
    def _check_manifold(self, attribute, value):
        if value not in MANIFOLD_KINDS:
            raise SpectrumError(
                f"Unknown manifold '{value}', expected one of {MANIFOLD_KINDS}"
            )

    @N.validator
    def _check_cutoff(self, attribute, value):
        if int(value) != value or value < 1:
            raise SpectrumError(f"N must be a positive integer, got {value!r}")

    @p.validator
    def _check_exponent(self, attribute, value):
        if int(value) != value or value < 1:
            raise ValueError(f"p must be an integer >= 1, got {value!r}")

    def __attrs_post_init__(self):
        lam1 = FIRST_FREQUENCY[self.manifold]
        if not 0.0 < self.m < lam1:
            raise ValueError(f"m must lie in (0, {lam1}), got {self.m!r}")

    @property
    def degree(self) -> int:
        r"""Degree 2p+1 of the nonlinearity"""
        return 2 * self.p + 1
