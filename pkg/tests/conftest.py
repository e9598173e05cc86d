#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import numpy as np
import pytest

import kgman
from kgman.core.spectrum import spectrum_for


@pytest.fixture(scope="session")
def params():
    return kgman.ModelParams(m=0.5, p=1, N=8)


@pytest.fixture(scope="session")
def small_params():
    return kgman.ModelParams(m=0.5, p=1, N=2)


@pytest.fixture(scope="session")
def torus_params():
    return kgman.ModelParams(m=0.5, p=1, N=2, manifold="torus2")


@pytest.fixture(scope="session")
def spectrum(params):
    return spectrum_for(params)


# Center-stable and center-manifold tests share one scale; ε = 0.1 keeps the
# admissible center ball large enough for the Ψ scans
@pytest.fixture(scope="session")
def trunc(params):
    return kgman.TruncationConfig.build(params, 0.1)


@pytest.fixture(scope="session")
def fine_trunc(params):
    return kgman.TruncationConfig.build(params, 0.01)


@pytest.fixture
def rng():
    np.random.seed(0)
    return np.random.default_rng(0)
