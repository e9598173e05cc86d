#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from .config import ExperimentConfig, load_config, parse_config
from .emit import Emitter, Series, render_svg
from .experiments import Experiment, experiment_map, register_experiment, sweep
from .main import main, run
