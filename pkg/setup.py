#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import builtins
import sys

from setuptools import find_packages, setup

if __name__ == "__main__":
    assert sys.version_info >= (3, 9), "Must use python3.9 or newer"

    with open("./requirements.txt", "r") as f:
        requirements = [l.strip() for l in f.readlines() if len(l.strip()) > 0]

    builtins.__KGMAN_SETUP__ = True
    import kgman

    setup(
        name="kgman",
        version=kgman.__version__,
        author="kgman contributors",
        description="Homoclinic orbits and invariant manifolds of the "
        "Klein-Gordon equation on compact manifolds",
        long_description="",
        packages=find_packages(exclude=["tests", "tests.*"]),
        install_requires=requirements,
        entry_points={"console_scripts": ["kgman=kgman.cli.main:main"]},
        zip_safe=False,
    )
