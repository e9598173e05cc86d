#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from .basis import (
    HyperbolicBasis,
    hyperbolic_basis,
    hyperbolic_potential,
    rho_by_reduction,
    rho_path,
    sigma_path,
)
from .certificate import (
    Certificate,
    alpha_power_tail,
    boundedness_certificate,
    potential_integral,
)
from .modes import (
    CenterPropagator,
    TorusInvariants,
    center_propagator,
    free_flow,
    mode_frequencies,
    mode_path,
    mode_propagate,
    mode_sup_ratio,
    scatter_asymptotics,
    torus_level_drift,
    torus_levels,
)

__all__ = [
    "HyperbolicBasis",
    "hyperbolic_basis",
    "hyperbolic_potential",
    "rho_by_reduction",
    "rho_path",
    "sigma_path",
    "Certificate",
    "alpha_power_tail",
    "boundedness_certificate",
    "potential_integral",
    "CenterPropagator",
    "TorusInvariants",
    "center_propagator",
    "free_flow",
    "mode_frequencies",
    "mode_path",
    "mode_propagate",
    "mode_sup_ratio",
    "scatter_asymptotics",
    "torus_level_drift",
    "torus_levels",
]
