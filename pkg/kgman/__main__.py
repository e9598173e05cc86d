#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import sys

from kgman.cli.main import main

sys.exit(main())
