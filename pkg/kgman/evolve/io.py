#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import os

import numpy as np

from kgman.core.params import ModelParams
from kgman.evolve.integrator import Trajectory, make_trajectory
from kgman.utils import atomic_write

CSV_COLUMNS = ("t", "a0", "b0", "H", "J", "norm_c")

_HEADER = np.dtype("<i8")
_SAMPLE = np.dtype("<f8")


def write_trajectory_csv(traj: Trajectory, path: str):
    r"""Writes ``t,a0,b0,H,J,norm_c`` rows with 17 significant digits"""
    table = np.column_stack(
        [
            traj.times,
            traj.A[:, 0],
            traj.B[:, 0],
            traj.observables["H"],
            traj.observables["J"],
            traj.observables["norm_c"],
        ]
    )
    with atomic_write(path, "w", newline="") as f:
        np.savetxt(
            f,
            table,
            fmt="%.17g",
            delimiter=",",
            header=",".join(CSV_COLUMNS),
            comments="",
        )


def write_trajectory_binary(traj: Trajectory, path: str):
    r"""Full-state little-endian dump

    Layout: int64 header ``{N, count}``, then for each sample the time, the
    a-vector and the b-vector as float64.
    """
    header = np.array([traj.params.N, len(traj)], dtype=_HEADER)
    body = np.column_stack([traj.times, traj.A, traj.B]).astype(_SAMPLE)
    with atomic_write(path, "wb") as f:
        f.write(header.tobytes())
        f.write(body.tobytes())


def read_trajectory_binary(path: str, params: ModelParams) -> Trajectory:
    r"""Reads a dump written by :py:func:`write_trajectory_binary`

    The mode count per sample is recovered from the file size and must agree
    with ``params``.
    """
    size = os.path.getsize(path)
    with open(path, "rb") as f:
        N, count = np.frombuffer(f.read(2 * _HEADER.itemsize), dtype=_HEADER)
        body = np.frombuffer(f.read(), dtype=_SAMPLE)

    if N != params.N:
        raise ValueError(f"Dump was written with N={N}, expected N={params.N}")
    width = (size - 2 * _HEADER.itemsize) // (_SAMPLE.itemsize * max(count, 1))
    dim = (width - 1) // 2
    body = body.reshape(int(count), int(width))
    times = body[:, 0].copy()
    A = body[:, 1 : 1 + dim].copy()
    B = body[:, 1 + dim :].copy()
    return make_trajectory(times, A, B, params)
