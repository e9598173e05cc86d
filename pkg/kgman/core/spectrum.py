#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import functools
from typing import List, Optional, Tuple

import attr
import numpy as np
import scipy.fft

from kgman.core.params import MANIFOLD_KINDS, ModelParams
from kgman.errors import QuadratureResolutionError, SpectrumError

CONST, COS, SIN = 0, 1, 2
_KIND_NAMES = {CONST: "const", COS: "cos", SIN: "sin"}

SQRT2 = np.sqrt(2.0)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class Spectrum(object):
    r"""Ordered real eigenbasis of the Laplacian truncated at frequency N

    Entry n holds the frequency ``lam[n]`` (square root of the Laplacian
    eigenvalue), the wavevector ``wavevectors[n]`` and whether the
    eigenfunction is the constant, ``√2 cos(k·x)`` or ``√2 sin(k·x)``.
    Eigenfunctions have unit norm for the volume-one inner product.
    """
    kind: str
    N: int
    lam: np.ndarray
    wavevectors: np.ndarray
    parts: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.lam)

    @property
    def ndim(self) -> int:
        return self.wavevectors.shape[1]

    @property
    def entries(self) -> List[Tuple[int, float, str]]:
        r"""``(n, λ_n, tag)`` triples, e.g. ``(3, 2.0, "cos(2)")``"""
        out = []
        for n in range(self.dim):
            k = ",".join(str(int(c)) for c in self.wavevectors[n])
            part = self.parts[n]
            tag = "1" if part == CONST else f"{_KIND_NAMES[part]}({k})"
            out.append((n, float(self.lam[n]), tag))
        return out

    def elliptic(self) -> np.ndarray:
        return np.arange(1, self.dim)

    def __eq__(self, other):
        return (
            isinstance(other, Spectrum)
            and self.kind == other.kind
            and self.N == other.N
        )

    def __hash__(self):
        return hash((self.kind, self.N))


def _circle_wavevectors(N: int) -> List[Tuple[int, ...]]:
    return [(k,) for k in range(1, N + 1)]


def _torus_wavevectors(N: int) -> List[Tuple[int, ...]]:
    # one representative of each ±k pair: k1 > 0, or k1 == 0 and k2 > 0
    reps = [
        (k1, k2)
        for k1 in range(0, N + 1)
        for k2 in range(-N, N + 1)
        if (k1 > 0 or k2 > 0) and k1 * k1 + k2 * k2 <= N * N
    ]
    return sorted(reps, key=lambda k: (k[0] ** 2 + k[1] ** 2, k))


def build_spectrum(kind: str, N: int) -> Spectrum:
    r"""Builds the truncated eigenbasis

    Args:
        kind (str): ``circle`` or ``torus2``
        N (int): Frequency cutoff; the circle keeps 2N+1 entries

    Returns:
        Spectrum: Entries sorted by frequency, cosine before sine within a
            wavevector and wavevectors in lexicographic order within a shell
    """
    if kind not in MANIFOLD_KINDS:
        raise SpectrumError(f"Unknown manifold '{kind}'")
    if int(N) != N or N < 1:
        raise SpectrumError(f"Need at least one elliptic frequency, got N={N!r}")

    reps = _circle_wavevectors(N) if kind == "circle" else _torus_wavevectors(N)
    d = len(reps[0])

    wavevectors = [(0,) * d]
    parts = [CONST]
    for k in reps:
        wavevectors += [k, k]
        parts += [COS, SIN]
    wavevectors = np.asarray(wavevectors, dtype=np.int64)
    lam = np.sqrt((wavevectors ** 2).sum(axis=1).astype(np.float64))

    return Spectrum(
        kind=kind,
        N=int(N),
        lam=lam,
        wavevectors=wavevectors,
        parts=np.asarray(parts, dtype=np.int64),
    )


def required_grid_size(N: int, p: int) -> int:
    r"""Smallest power of two ≥ (p+1)(2N+1), the per-axis dealiasing size"""
    need = (p + 1) * (2 * N + 1)
    return 1 << (need - 1).bit_length()


@attr.s(auto_attribs=True, frozen=True, eq=False)
class SpectralGrid(object):
    r"""Uniform quadrature grid used for pseudo-spectral products

    Synthesis and analysis act on the trailing axis of coefficient arrays and
    on the trailing ``ndim`` axes of grid arrays, so time series of states are
    processed in one FFT call.

    Args:
        spectrum (Spectrum): The basis
        p (int): Nonlinearity exponent the grid must dealias
        size (Optional[int]): Points per axis; defaults to the padding rule.
            A smaller explicit size raises QuadratureResolutionError
    """
    spectrum: Spectrum
    p: int
    size: Optional[int] = None
    _pos: np.ndarray = attr.ib(default=None, init=False, repr=False)
    _neg: np.ndarray = attr.ib(default=None, init=False, repr=False)

    def __attrs_post_init__(self):
        need = required_grid_size(self.spectrum.N, self.p)
        size = need if self.size is None else int(self.size)
        if size < (self.p + 1) * (2 * self.spectrum.N + 1):
            raise QuadratureResolutionError(
                f"Grid of {size} points per axis cannot dealias degree "
                f"{2 * self.p + 2} products at N={self.spectrum.N}; "
                f"need at least {(self.p + 1) * (2 * self.spectrum.N + 1)}"
            )
        object.__setattr__(self, "size", size)

        k = self.spectrum.wavevectors
        strides = size ** np.arange(k.shape[1] - 1, -1, -1)
        object.__setattr__(self, "_pos", ((k % size) * strides).sum(axis=1))
        object.__setattr__(self, "_neg", ((-k % size) * strides).sum(axis=1))

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.size,) * self.spectrum.ndim

    @property
    def points(self) -> int:
        return self.size ** self.spectrum.ndim

    def _axes(self):
        return tuple(range(-self.spectrum.ndim, 0))

    def synthesize(self, a: np.ndarray) -> np.ndarray:
        r"""Grid values of ``Σ a_n e_n``"""
        a = np.asarray(a, dtype=np.float64)
        batch = a.shape[:-1]
        parts = self.spectrum.parts
        cos_idx = np.flatnonzero(parts == COS)
        sin_idx = np.flatnonzero(parts == SIN)

        coeffs = np.zeros(batch + (self.points,), dtype=np.complex128)
        coeffs[..., 0] = a[..., 0]
        half = 0.5 * SQRT2
        coeffs[..., self._pos[cos_idx]] += half * a[..., cos_idx]
        coeffs[..., self._neg[cos_idx]] += half * a[..., cos_idx]
        coeffs[..., self._pos[sin_idx]] += -1j * half * a[..., sin_idx]
        coeffs[..., self._neg[sin_idx]] += 1j * half * a[..., sin_idx]

        coeffs = coeffs.reshape(batch + self.shape)
        return scipy.fft.ifftn(coeffs, axes=self._axes(), norm="forward").real

    def analyze(self, f: np.ndarray) -> np.ndarray:
        r"""Coefficients ``⟨f, e_n⟩`` of grid values for every kept entry"""
        f = np.asarray(f, dtype=np.float64)
        ndim = self.spectrum.ndim
        batch = f.shape[: f.ndim - ndim]
        coeffs = scipy.fft.fftn(f, axes=self._axes(), norm="forward")
        coeffs = coeffs.reshape(batch + (self.points,))

        picked = coeffs[..., self._pos]
        parts = self.spectrum.parts
        return np.where(
            parts == CONST,
            picked.real,
            np.where(parts == COS, SQRT2 * picked.real, -SQRT2 * picked.imag),
        )

    def mean(self, f: np.ndarray) -> np.ndarray:
        r"""Volume-one integral of grid values (exact for trigonometric polynomials)"""
        return np.mean(f, axis=self._axes())


@functools.lru_cache(maxsize=None)
def spectrum_for(params: ModelParams) -> Spectrum:
    return build_spectrum(params.manifold, params.N)


@functools.lru_cache(maxsize=None)
def grid_for(params: ModelParams) -> SpectralGrid:
    return SpectralGrid(spectrum_for(params), params.p)
