#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from .center import (
    CenterManifoldOrbit,
    LyapunovReport,
    center_manifold_orbit,
    center_manifold_psi,
    lyapunov_within_Wc,
)
from .center_stable import (
    CenterStableSolution,
    TruncationReport,
    solution_distance,
    solve_center_stable,
    solver_context,
    truncation_consistency,
)
from .diagnostics import ConvergenceReport, convergence_to_Wc
from .heteroclinic import (
    HeteroclinicOrbit,
    reflect,
    reflection_mismatch,
    reversible_heteroclinic,
)
from .truncation import (
    TruncationConfig,
    cutoff_theta,
    remainder_force,
    truncated_F_force,
    truncated_N,
    truncated_x_force,
    z_force,
)
