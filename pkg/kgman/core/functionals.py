#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Tuple

import numpy as np

from kgman.core.params import ModelParams
from kgman.core.spectrum import grid_for, spectrum_for
from kgman.core.state import State


def _check_dim(X: State, params: ModelParams):
    dim = spectrum_for(params).dim
    if X.dim != dim:
        raise ValueError(
            f"State has {X.dim} modes but the {params.manifold} spectrum at "
            f"N={params.N} has {dim}"
        )


def nonlinear_force(a: np.ndarray, params: ModelParams) -> np.ndarray:
    r"""b-rate ``-⟨u^{2p+1}, e_n⟩`` for stacked position coefficients

    Args:
        a (np.ndarray): Coefficients, trailing axis over the spectrum
        params (ModelParams): The model

    Returns:
        np.ndarray: Same shape as ``a``
    """
    grid = grid_for(params)
    u = grid.synthesize(a)
    return -grid.analyze(u ** params.degree)


def nonlinear_term(X: State, params: ModelParams) -> State:
    r"""``F(X) = (0, -u^{2p+1})`` projected on the kept modes"""
    _check_dim(X, params)
    return State(np.zeros(X.dim), nonlinear_force(X.a, params))


def quadratic_energy(X: State, params: ModelParams) -> float:
    lam = spectrum_for(params).lam
    return 0.5 * float(np.sum((lam ** 2 - params.m ** 2) * X.a ** 2 + X.b ** 2))


def potential_energy(a: np.ndarray, params: ModelParams) -> np.ndarray:
    r"""``∫u^{2p+2}/(2p+2)`` for stacked position coefficients"""
    grid = grid_for(params)
    u = grid.synthesize(a)
    return grid.mean(u ** (2 * params.p + 2)) / (2 * params.p + 2)


def energy(X: State, params: ModelParams) -> float:
    r"""Hamiltonian ``½Σ[(λ_n²-m²)a_n² + b_n²] + ∫u^{2p+2}/(2p+2)``"""
    _check_dim(X, params)
    return quadratic_energy(X, params) + float(potential_energy(X.a, params))


def energies(a: np.ndarray, b: np.ndarray, params: ModelParams) -> np.ndarray:
    r"""Row-wise Hamiltonian of stacked states"""
    lam = spectrum_for(params).lam
    quad = 0.5 * np.sum((lam ** 2 - params.m ** 2) * a ** 2 + b ** 2, axis=-1)
    return quad + potential_energy(a, params)


def j_functionals(a: np.ndarray, b: np.ndarray, params: ModelParams) -> np.ndarray:
    lam = spectrum_for(params).lam[1:]
    w = (lam ** 2 - params.m ** 2) * a[..., 1:] ** 2 + b[..., 1:] ** 2
    return 0.5 * np.sum(w, axis=-1)


def j_functional(X: State, params: ModelParams) -> float:
    r"""Elliptic energy ``J = ½Σ_{k≥1}[(λ_k²-m²)a_k² + b_k²]``"""
    _check_dim(X, params)
    return float(j_functionals(X.a, X.b, params))


def center_field(X: State, params: ModelParams) -> np.ndarray:
    r"""Grid values of ``U = Σ_{k≥1} a_k e_k``, the elliptic part of u"""
    a = X.a.copy()
    a[0] = 0.0
    return grid_for(params).synthesize(a)


def energy_split(X: State, params: ModelParams) -> Tuple[float, float, float]:
    r"""Splits H into hyperbolic, elliptic and coupling parts

    ``H = ½(b_0² - m²a_0²) + J + ∫(a_0 + U)^{2p+2}/(2p+2)``

    Returns:
        float: The hyperbolic quadratic part
        float: J
        float: The coupling term
    """
    _check_dim(X, params)
    grid = grid_for(params)
    h_part = 0.5 * (X.b[0] ** 2 - params.m ** 2 * X.a[0] ** 2)
    u = X.a[0] + center_field(X, params)
    coupling = grid.mean(u ** (2 * params.p + 2)) / (2 * params.p + 2)
    return float(h_part), j_functional(X, params), float(coupling)
