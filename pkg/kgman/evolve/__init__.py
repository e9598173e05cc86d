#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from .integrator import (
    DEFAULT_OBSERVERS,
    AprioriReport,
    Trajectory,
    apriori_bound_report,
    integrate,
    integrate_backward,
    make_trajectory,
)
from .io import read_trajectory_binary, write_trajectory_binary, write_trajectory_csv
from .scheme import (
    STRANG,
    TRIPLE_JUMP,
    SchemeConfig,
    Stepper,
    composition_weights,
    linear_coefficients,
    linear_flow,
    step,
)
