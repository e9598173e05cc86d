#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import contextlib
import os
import os.path as osp
import tempfile
from typing import Tuple

import numpy as np


def fit_log_slope(x: np.ndarray, y: np.ndarray) -> float:
    r"""Least-squares slope of log(y) against log(x)

    Args:
        x (np.ndarray): Positive abscissae
        y (np.ndarray): Positive ordinates

    Returns:
        float: The fitted exponent k in y ~ C x^k
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.abs(np.asarray(y, dtype=np.float64))
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def fit_exponential_rate(t: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    r"""Log-linear least-squares fit y ~ C e^{k t}

    Zero and non-finite samples are dropped.

    Args:
        t (np.ndarray): Sample times
        y (np.ndarray): Sampled magnitudes

    Returns:
        float: The rate k (negative for decay)
        float: The prefactor C
    """
    t = np.asarray(t, dtype=np.float64)
    y = np.abs(np.asarray(y, dtype=np.float64))
    keep = (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan"), float("nan")
    rate, log_c = np.polyfit(t[keep], np.log(y[keep]), 1)
    return float(rate), float(np.exp(log_c))


def uniform_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    r"""Uniform grid from t0 to t1 (inclusive) with spacing as close to dt as fits"""
    n = max(1, int(round(abs(t1 - t0) / abs(dt))))
    return t0 + (t1 - t0) * np.arange(n + 1) / n


@contextlib.contextmanager
def atomic_write(path: str, mode: str = "w", **kwargs):
    r"""Writes to a temporary sibling file and renames it over ``path`` on success"""
    dirname = osp.dirname(osp.abspath(path))
    os.makedirs(dirname, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(
        dir=dirname, prefix="." + osp.basename(path), suffix=".tmp"
    )
    try:
        with os.fdopen(fd, mode, **kwargs) as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        if osp.exists(tmp_path):
            os.remove(tmp_path)
        raise
