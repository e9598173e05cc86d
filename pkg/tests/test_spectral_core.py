#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import attr
import numpy as np
import pytest

import kgman
import kgman.errors
from kgman.core.spectrum import SpectralGrid, build_spectrum, required_grid_size


@pytest.mark.parametrize(
    "kind,N,dim",
    [("circle", 1, 3), ("circle", 8, 17), ("torus2", 1, 5), ("torus2", 2, 13)],
)
def test_spectrum_dim(kind, N, dim):
    spectrum = build_spectrum(kind, N)
    assert spectrum.dim == dim
    assert spectrum.lam[0] == 0.0
    assert np.all(np.diff(spectrum.lam) >= 0)
    assert np.all(spectrum.lam[1:] <= N)


def test_circle_entries():
    entries = build_spectrum("circle", 2).entries
    assert entries[0] == (0, 0.0, "1")
    assert entries[1] == (1, 1.0, "cos(1)")
    assert entries[2] == (2, 1.0, "sin(1)")
    assert entries[3] == (3, 2.0, "cos(2)")


def test_spectrum_errors():
    with pytest.raises(kgman.errors.SpectrumError):
        build_spectrum("sphere", 4)
    with pytest.raises(kgman.errors.SpectrumError):
        kgman.ModelParams(N=0)
    with pytest.raises(kgman.errors.SpectrumError):
        kgman.ModelParams(manifold="disk")


@pytest.mark.parametrize("m", [0.0, 1.0, 1.5, -0.2])
def test_mass_range(m):
    with pytest.raises(ValueError):
        kgman.ModelParams(m=m)


def test_params_eq():
    assert kgman.ModelParams(m=0.5, p=1, N=8) == kgman.ModelParams()
    assert kgman.ModelParams(p=2).degree == 5


@pytest.mark.parametrize(
    "kwargs", [dict(p=0), dict(p=1.5), dict(N=2.5), dict(manifold="sphere")]
)
def test_params_validators(kwargs):
    with pytest.raises(ValueError):
        kgman.ModelParams(**kwargs)
    with pytest.raises(ValueError):
        attr.evolve(kgman.ModelParams(), **kwargs)


@pytest.mark.parametrize("N,p", [(1, 1), (8, 1), (8, 2), (5, 3)])
def test_grid_size_dealiases(N, p):
    size = required_grid_size(N, p)
    assert size >= (p + 1) * (2 * N + 1)
    assert size & (size - 1) == 0


def test_explicit_grid_too_small():
    with pytest.raises(kgman.errors.QuadratureResolutionError):
        SpectralGrid(build_spectrum("circle", 8), p=1, size=16)


@pytest.mark.parametrize("kind", ["circle", "torus2"])
def test_analyze_inverts_synthesize(kind, rng):
    params = kgman.ModelParams(N=3, manifold=kind)
    grid = kgman.grid_for(params)
    a = rng.standard_normal((4, grid.spectrum.dim))
    assert np.allclose(grid.analyze(grid.synthesize(a)), a, atol=1e-13)


def test_cubic_force_single_mode():
    params = kgman.ModelParams(m=0.5, p=1, N=4)
    amp = 0.3
    a = np.zeros(kgman.spectrum_for(params).dim)
    a[1] = amp
    force = kgman.nonlinear_force(a, params)
    # (√2 cos x)^3 = √2 (3 cos x + cos 3x) / 2
    expected = np.zeros_like(a)
    expected[1] = -1.5 * amp ** 3
    expected[5] = -0.5 * amp ** 3
    assert np.allclose(force, expected, atol=1e-15)


@pytest.mark.parametrize(
    "kind,N,p,size",
    [("circle", 8, 1, 256), ("circle", 8, 2, 256), ("torus2", 2, 1, 64)],
)
def test_products_match_dense_quadrature(kind, N, p, size, rng):
    params = kgman.ModelParams(m=0.5, p=p, N=N, manifold=kind)
    spectrum = kgman.spectrum_for(params)
    dense = SpectralGrid(spectrum, p, size=size)
    assert dense.size > kgman.grid_for(params).size
    a = np.stack(
        [kgman.random_state(spectrum, amplitude=0.8, rng=rng).a for _ in range(3)]
    )
    expected = -dense.analyze(dense.synthesize(a) ** params.degree)
    scale = max(1.0, float(np.max(np.abs(expected))))
    assert np.allclose(kgman.nonlinear_force(a, params), expected, atol=1e-13 * scale)


@pytest.mark.parametrize("p", [1, 2])
def test_nonlinear_term_lipschitz_on_ball(p, rng):
    params = kgman.ModelParams(m=0.5, p=p, N=8)
    spectrum = kgman.spectrum_for(params)
    # ‖u‖_∞ ≤ sup_gain·‖X‖ on the kept modes
    sup_gain = np.sqrt(2.0 * np.sum(1.0 / (1.0 + spectrum.lam ** 2)))
    radius = 1.0
    bound = params.degree * (sup_gain * radius) ** (2 * p)

    def draw():
        X = kgman.random_state(spectrum, amplitude=1.0, rng=rng)
        return (radius * rng.uniform() / kgman.state_norm(X, spectrum)) * X

    worst = 0.0
    for _ in range(40):
        X, Y = draw(), draw()
        dN = kgman.nonlinear_term(X, params) - kgman.nonlinear_term(Y, params)
        ratio = kgman.state_norm(dN, spectrum) / kgman.state_norm(X - Y, spectrum)
        worst = max(worst, ratio)
    assert 0.0 < worst <= bound


def test_reversing_symmetry(params, spectrum, rng):
    for _ in range(5):
        X = kgman.random_state(spectrum, amplitude=0.5, rng=rng)
        SX = kgman.apply_symmetry(X)
        assert kgman.apply_symmetry(SX) == X
        # the field satisfies V(SX) = -S V(X)
        assert kgman.nonlinear_term(SX, params) == -kgman.apply_symmetry(
            kgman.nonlinear_term(X, params)
        )
        assert kgman.energy(SX, params) == pytest.approx(
            kgman.energy(X, params), abs=1e-15
        )
        assert kgman.j_functional(SX, params) == kgman.j_functional(X, params)


def test_state_is_read_only():
    X = kgman.State([1.0, 2.0], [3.0, 4.0])
    with pytest.raises(ValueError):
        X.a[0] = 5.0
    with pytest.raises(ValueError):
        kgman.State([1.0, 2.0], [3.0])


def test_state_arithmetic():
    X = kgman.State.single_mode(3, 1, a=1.0, b=2.0)
    Y = 2.0 * X - X
    assert Y == X
    assert (-X).allclose(kgman.State([0.0, -1.0, 0.0], [0.0, -2.0, 0.0]))
    assert kgman.apply_symmetry(X) == kgman.State([0.0, 1.0, 0.0], [0.0, -2.0, 0.0])


def test_norms(spectrum, params):
    X = kgman.State.single_mode(spectrum.dim, 3, a=1.0, b=2.0)
    # λ = 2 on entry 3
    assert kgman.state_norm(X, spectrum) == pytest.approx(np.sqrt(5.0 + 4.0))
    assert kgman.center_norms(X.a, X.b, spectrum.lam) == pytest.approx(3.0)
    assert kgman.mode_norm(np.array([1.0, 2.0]), 2.0, params.m) == pytest.approx(
        np.sqrt(3.75 + 4.0)
    )


def test_projections(spectrum):
    X = kgman.State(np.arange(spectrum.dim, dtype=float), np.ones(spectrum.dim))
    h = kgman.project_h(X)
    assert (h.a0, h.b0) == (0.0, 1.0)
    c = kgman.project_c(X)
    assert c.a[0] == 0.0 and c.b[0] == 0.0
    assert kgman.embed_h(h, spectrum.dim) + c == X


def test_homoclinic_energy_vanishes(params):
    for t in np.linspace(-40.0, 40.0, 41):
        assert abs(kgman.energy(kgman.homoclinic_state(t, params), params)) < 1e-14


def test_energy_split(params, spectrum, rng):
    X = kgman.random_state(spectrum, amplitude=0.2, rng=rng)
    h_part, J, coupling = kgman.energy_split(X, params)
    assert h_part + J + coupling == pytest.approx(kgman.energy(X, params), abs=1e-14)
    assert J == pytest.approx(kgman.j_functional(X, params))
    U = kgman.center_field(X, params)
    assert abs(np.mean(U)) < 1e-14


def test_random_state_reproducible(spectrum):
    X1 = kgman.random_state(spectrum, rng=np.random.default_rng(3))
    X2 = kgman.random_state(spectrum, rng=np.random.default_rng(3))
    assert X1 == X2
    # coefficients decay with the frequency weight
    assert np.abs(X1.a[-1]) <= (1.0 + spectrum.lam[-1] ** 2) ** -1 * 10.0


def test_wrong_dimension(params):
    with pytest.raises(ValueError):
        kgman.energy(kgman.State.zeros(5), params)
