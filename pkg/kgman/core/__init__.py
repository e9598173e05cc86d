#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from .functionals import (
    center_field,
    energies,
    energy,
    energy_split,
    j_functional,
    j_functionals,
    nonlinear_force,
    nonlinear_term,
)
from .params import ModelParams
from .spectrum import (
    SpectralGrid,
    Spectrum,
    build_spectrum,
    grid_for,
    required_grid_size,
    spectrum_for,
)
from .state import (
    HyperbolicPoint,
    State,
    apply_symmetry,
    center_norms,
    embed_h,
    mode_norm,
    project_c,
    project_h,
    random_state,
    state_norm,
    state_norms,
)
