#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import builtins

__version__ = "0.1.0"

if not getattr(builtins, "__KGMAN_SETUP__", False):
    from .core import *
    from .homoclinic import *
    from .evolve import *
    from .linearized import *
    from .manifolds import *
