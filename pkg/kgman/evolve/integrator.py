#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

from typing import Callable, Dict, List, Mapping, Optional

import attr
import numpy as np

from kgman.core.functionals import energies, energy, j_functionals
from kgman.core.params import ModelParams
from kgman.core.spectrum import spectrum_for
from kgman.core.state import State, apply_symmetry, center_norms
from kgman.errors import EnergyDriftError
from kgman.evolve.scheme import KickForce, SchemeConfig, Stepper
from kgman.logging import logger

# observer(A, B, params) -> one value per sample
Observer = Callable[[np.ndarray, np.ndarray, ModelParams], np.ndarray]


def _observe_norm_h(A, B, params):
    return np.hypot(A[:, 0], B[:, 0])


def _observe_norm_c(A, B, params):
    return center_norms(A, B, spectrum_for(params).lam)


DEFAULT_OBSERVERS: Dict[str, Observer] = {
    "H": energies,
    "J": j_functionals,
    "norm_h": _observe_norm_h,
    "norm_c": _observe_norm_c,
}


@attr.s(auto_attribs=True, frozen=True, eq=False)
class Trajectory(object):
    r"""Sampled solution

    Args:
        times (np.ndarray): Strictly increasing sample times
        A (np.ndarray): Position coefficients, one row per sample
        B (np.ndarray): Momentum coefficients, one row per sample
        params (ModelParams): The model the samples belong to
        observables (Dict[str, np.ndarray]): Per-sample observer values
        H0 (float): Energy of the initial datum
        dt (float): Step actually used (negative for backward runs)
    """
    times: np.ndarray
    A: np.ndarray
    B: np.ndarray
    params: ModelParams
    observables: Dict[str, np.ndarray] = attr.ib(factory=dict)
    H0: float = float("nan")
    dt: float = float("nan")

    def __attrs_post_init__(self):
        n = len(self.times)
        if self.A.shape[0] != n or self.B.shape[0] != n:
            raise ValueError("times, A and B must have the same number of samples")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("Trajectory times must be strictly increasing")
        for name, values in self.observables.items():
            if len(values) != n:
                raise ValueError(f"Observable '{name}' has the wrong length")

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> State:
        return State(self.A[i], self.B[i])

    @property
    def states(self) -> List[State]:
        return [self.state(i) for i in range(len(self))]

    def index_of(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))


def make_trajectory(
    times: np.ndarray,
    A: np.ndarray,
    B: np.ndarray,
    params: ModelParams,
    observers: Optional[Mapping[str, Observer]] = None,
    H0: float = float("nan"),
    dt: float = float("nan"),
) -> Trajectory:
    r"""Builds a Trajectory, sorting samples by time and evaluating observers"""
    order = np.argsort(times, kind="stable")
    times, A, B = times[order], A[order], B[order]
    if observers is None:
        observers = DEFAULT_OBSERVERS
    observables = {
        name: np.asarray(fn(A, B, params), dtype=np.float64)
        for name, fn in observers.items()
    }
    return Trajectory(times, A, B, params, observables, H0, dt)


def _energy_scale(A: np.ndarray, B: np.ndarray, params: ModelParams, H0: float):
    # largest quadratic energy along the orbit; H0 vanishes on the homoclinic
    lam = spectrum_for(params).lam
    quad = 0.5 * np.sum((lam ** 2 + params.m ** 2) * A ** 2 + B ** 2, axis=1)
    return max(abs(H0), float(np.max(quad)), np.finfo(np.float64).tiny)


def integrate(
    X0: State,
    T: float,
    params: ModelParams,
    scheme: SchemeConfig,
    observers: Optional[Mapping[str, Observer]] = None,
    force: Optional[KickForce] = None,
    t0: float = 0.0,
    sample_every: int = 1,
    stop: Optional[Callable[[float, np.ndarray, np.ndarray], bool]] = None,
    check_drift: Optional[bool] = None,
) -> Trajectory:
    r"""Integrates from ``t0`` to ``t0 + T`` with the splitting scheme

    The step is adjusted to ``T/n`` with ``n = round(|T|/dt)``. A negative T
    integrates backward; the returned samples are always sorted by time.

    Args:
        X0 (State): Initial datum at ``t0``
        T (float): Signed duration, nonzero
        params (ModelParams): The model
        scheme (SchemeConfig): Order, step and drift tolerance
        observers (Optional[Mapping[str, Observer]]): Per-sample observables,
            defaults to H, J, |X_h| and ‖X_c‖
        force (Optional[KickForce]): Kick force replacing the KG nonlinearity
        t0 (float): Initial time, passed to time-dependent forces
        sample_every (int): Keep every k-th step (the last step is always kept)
        stop (Optional[Callable]): ``stop(t, a, b)``; integration ends after the
            first step where it returns True
        check_drift (Optional[bool]): Enforce ``scheme.drift_tolerance``;
            defaults to True for the Hamiltonian force only

    Returns:
        Trajectory: The samples, including the initial datum
    """
    if T == 0:
        raise ValueError("Integration time must be nonzero")
    if check_drift is None:
        check_drift = force is None

    n = max(1, int(round(abs(T) / scheme.dt)))
    h = T / n
    stepper = Stepper(params, scheme, force)

    times = [t0]
    A = [X0.a.copy()]
    B = [X0.b.copy()]
    a, b = X0.a.copy(), X0.b.copy()
    for k in range(n):
        t = t0 + k * h
        a, b = stepper.step(a, b, t, h)
        t_next = t0 + (k + 1) * h
        done = stop is not None and stop(t_next, a, b)
        if (k + 1) % sample_every == 0 or k + 1 == n or done:
            times.append(t_next)
            A.append(a)
            B.append(b)
        if done:
            logger.debug(f"Integration stopped early at t={t_next:.6g}")
            break

    times = np.asarray(times)
    A = np.asarray(A)
    B = np.asarray(B)

    H0 = energy(X0, params)
    if check_drift:
        H = energies(A, B, params)
        drift = np.abs(H - H0) / _energy_scale(A, B, params, H0)
        bad = np.flatnonzero(drift > scheme.drift_tolerance)
        if len(bad):
            raise EnergyDriftError(
                float(times[bad[0]]), float(drift[bad[0]]), scheme.drift_tolerance
            )

    return make_trajectory(times, A, B, params, observers, H0, h)


def integrate_backward(
    X0: State,
    T: float,
    params: ModelParams,
    scheme: SchemeConfig,
    method: str = "conjugate",
    **kwargs,
) -> Trajectory:
    r"""Solution on ``[-|T|, 0]`` through X0 at time 0

    ``conjugate`` integrates ``Y(t) = S X(-t)`` forward from ``S X0`` and
    reflects back; ``direct`` steps with a negative time step. For a custom
    force ``f(a, b, t)`` the conjugated system uses ``f(a, -b, -t)``.
    """
    T = abs(T)
    if method == "direct":
        return integrate(X0, -T, params, scheme, **kwargs)
    if method != "conjugate":
        raise ValueError(f"Unknown backward method '{method}'")

    force = kwargs.pop("force", None)
    observers = kwargs.pop("observers", None)
    if force is not None:
        kwargs["force"] = lambda a, b, t: force(a, -b, -t)
        kwargs.setdefault("check_drift", False)
    forward = integrate(
        apply_symmetry(X0), T, params, scheme, observers={}, **kwargs
    )
    return make_trajectory(
        -forward.times,
        forward.A,
        -forward.B,
        params,
        observers,
        energy(X0, params),
        -forward.dt,
    )


@attr.s(auto_attribs=True, frozen=True)
class AprioriReport(object):
    r"""Check of the a-priori bound on the center and hyperbolic momenta

    ``b_0² + Σ_{k≥1}(b_k² + λ_k²a_k²) ≤ 2H⁰ + p·m^{2+2/p}/(p+1)`` at every sample.

    ``max_ratio`` is the worst left side over the bound.
    """
    bound: float
    max_lhs: float
    max_ratio: float
    worst_time: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.max_lhs <= self.bound + self.slack


def apriori_bound_report(
    traj: Trajectory, params: ModelParams, slack: Optional[float] = None
) -> AprioriReport:
    r"""Evaluates the a-priori energy bound along a trajectory

    The left side exceeds the bound by at most twice the energy drift of the
    discrete flow, so the default slack is ``2·max|H - H⁰|`` plus a rounding
    allowance. Violations are reported, never raised: they point at
    integrator failure.
    """
    if len(traj) == 0:
        raise ValueError("Empty trajectory")
    lam = spectrum_for(params).lam
    p, m = params.p, params.m
    H0 = traj.H0
    if not np.isfinite(H0):
        H0 = energy(traj.state(0), params)

    lhs = traj.B[:, 0] ** 2 + np.sum(
        traj.B[:, 1:] ** 2 + lam[1:] ** 2 * traj.A[:, 1:] ** 2, axis=1
    )
    bound = 2.0 * H0 + p / (p + 1.0) * m ** (2.0 + 2.0 / p)
    if slack is None:
        H = traj.observables.get("H")
        if H is None:
            H = energies(traj.A, traj.B, params)
        slack = 2.0 * float(np.max(np.abs(H - H0))) + 1e-14 * max(abs(bound), 1.0)
    worst = int(np.argmax(lhs))
    if bound > 0:
        ratio = float(lhs[worst] / bound)
    else:
        ratio = 0.0 if lhs[worst] <= slack else float("inf")
    return AprioriReport(
        bound=float(bound),
        max_lhs=float(lhs[worst]),
        max_ratio=ratio,
        worst_time=float(traj.times[worst]),
        slack=slack,
    )
