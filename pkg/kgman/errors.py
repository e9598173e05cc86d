#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.


class SpectrumError(ValueError):
    pass


class QuadratureResolutionError(ValueError):
    pass


class AdmissibilityError(ValueError):
    pass


class CertificateError(ValueError):
    pass


class ConfigError(ValueError):
    r"""Raised while parsing or validating an experiment config.

    Args:
        message (str): What went wrong
        line (Optional[int]): 1-based line number in the config file, if any
    """

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EnergyDriftError(RuntimeError):
    def __init__(self, time: float, drift: float, tolerance: float):
        self.time = time
        self.drift = drift
        self.tolerance = tolerance
        super().__init__(
            f"Relative energy drift {drift:.3e} exceeds {tolerance:.3e} "
            f"first at t={time:.6g}; reduce the time step"
        )


class WronskianDriftError(RuntimeError):
    pass


class TailToleranceError(RuntimeError):
    pass


class BracketError(RuntimeError):
    pass


class PicardDivergenceError(RuntimeError):
    pass


class SymmetryResidualError(RuntimeError):
    pass


def assert_elliptic(a, b, tol: float = 0.0):
    r"""Checks that a center datum carries nothing on the hyperbolic mode 0"""
    if abs(a[0]) > tol or abs(b[0]) > tol:
        raise AdmissibilityError(
            "Center data must vanish on mode 0, got "
            f"(a_0, b_0) = ({a[0]!r}, {b[0]!r})"
        )
