#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

r"""Named experiments of the ``kgman`` command

Each experiment reads its ``exp.*`` options from the
:py:class:`ExperimentConfig`, runs the library and writes its tables, plots
and checks through an :py:class:`Emitter`. New experiments are added with
:py:func:`register_experiment`, exactly like the built-in ones below.
"""

import abc
import multiprocessing
import re
from typing import Callable, Dict, List, Optional, Sequence, Type

import attr
import numpy as np
import tqdm

from kgman.cli.config import ExperimentConfig
from kgman.cli.emit import Emitter, Series
from kgman.core.params import ModelParams
from kgman.core.spectrum import spectrum_for
from kgman.core.state import State, center_norms, random_state, state_norm
from kgman.errors import ConfigError
from kgman.evolve.integrator import apriori_bound_report, integrate
from kgman.evolve.io import (
    read_trajectory_binary,
    write_trajectory_binary,
    write_trajectory_csv,
)
from kgman.homoclinic import (
    HomoclinicOrbit,
    equilibria,
    planar_energy,
    planar_first_return,
    planar_orbit,
)
from kgman.linearized.basis import hyperbolic_basis, rho_by_reduction
from kgman.linearized.certificate import boundedness_certificate
from kgman.linearized.modes import (
    mode_frequencies,
    mode_sup_ratio,
    scatter_asymptotics,
    torus_level_drift,
)
from kgman.logging import logger
from kgman.manifolds.center import center_manifold_psi, lyapunov_within_Wc
from kgman.manifolds.center_stable import (
    solution_distance,
    solve_center_stable,
    truncation_consistency,
)
from kgman.manifolds.diagnostics import convergence_to_Wc
from kgman.manifolds.heteroclinic import reversible_heteroclinic
from kgman.manifolds.truncation import TruncationConfig
from kgman.utils import fit_exponential_rate, fit_log_slope, uniform_grid


def _camel_to_kebab(name):
    s1 = re.sub("(.)([A-Z][a-z]+)", r"\1-\2", name)
    return re.sub("([a-z0-9])([A-Z])", r"\1-\2", s1).lower()


class Experiment(abc.ABC):
    r"""Base class for all experiments

    Args:
        default_epsilon (float): ε used when the config sets no
            ``trunc.epsilon``
    """

    default_epsilon: float = 1e-2

    def truncation(self, cfg: ExperimentConfig) -> TruncationConfig:
        return cfg.truncation(self.default_epsilon)

    @abc.abstractmethod
    def run(self, cfg: ExperimentConfig, out: Emitter, jobs: int = 1):
        r"""Runs the experiment

        Args:
            cfg (ExperimentConfig): The parsed config
            out (Emitter): Destination of tables, plots and checks
            jobs (int): Worker processes for independent sweep points
        """
        pass


experiment_map: Dict[str, Experiment] = dict()


def register_experiment(
    experiment: Optional[Type[Experiment]] = None, *, name: Optional[str] = None
):
    r"""Registers an experiment with the ``kgman`` command

    Args:
        experiment (Optional[Type[Experiment]]): The class to register
            If none, will return a wrapper for use with decorator syntax
        name (Optional[str]): The name to register the experiment with
            If none, the class name converted to kebab case is used,
            i.e. PsiScan is registered as psi-scan
    """

    def _wrapper(experiment: Type[Experiment]):
        assert issubclass(
            experiment, Experiment
        ), "All experiments must inherit from kgman.cli.experiments.Experiment"

        experiment_map[
            _camel_to_kebab(experiment.__name__) if name is None else name
        ] = experiment()

        return experiment

    if experiment is None:
        return _wrapper
    else:
        return _wrapper(experiment)


def sweep(fn: Callable, points: Sequence, jobs: int = 1, desc: str = "") -> List:
    r"""Maps ``fn`` over sweep points, in input order

    With ``jobs > 1`` the points run on a spawn-context process pool; fn and
    the points must be picklable.
    """
    points = list(points)
    if jobs <= 1 or len(points) <= 1:
        return [fn(p) for p in tqdm.tqdm(points, desc=desc, leave=False)]
    mp_ctx = multiprocessing.get_context("spawn")
    with mp_ctx.Pool(min(jobs, len(points))) as pool:
        return list(
            tqdm.tqdm(pool.imap(fn, points), total=len(points), desc=desc, leave=False)
        )


def _elliptic_entries(
    cfg: ExperimentConfig, key: str, default: Sequence[int], params: ModelParams
) -> List[int]:
    dim = spectrum_for(params).dim
    entries = cfg.int_list(key, default)
    bad = [n for n in entries if not 1 <= n < dim]
    if bad:
        raise ConfigError(
            f"exp.{key}: entries {bad} are not elliptic, need 1 ≤ n < {dim} "
            f"for N={params.N}"
        )
    return entries


def _center_datum(params: ModelParams, entries: Sequence[int], norm: float) -> State:
    r"""Center datum with equal positions on ``entries``, zero momenta and
    h¹×ℓ² norm ``norm``"""
    spectrum = spectrum_for(params)
    a = np.zeros(spectrum.dim)
    a[list(entries)] = 1.0
    a *= norm / state_norm(State(a, np.zeros_like(a)), spectrum)
    return State(a, np.zeros_like(a))


@register_experiment
class PhasePortrait(Experiment):
    r"""The mode-0 phase portrait: both branches of the homoclinic level set
    and closed orbits through ``(η, 0)``"""

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        m = params.m
        orbit = HomoclinicOrbit(params)
        T = cfg.option("T", 20.0 / m)
        t = np.linspace(-T, T, cfg.option("samples", 2001))
        a, b = orbit.alpha(t), orbit.beta(t)
        level = planar_energy(a, b, params)
        out.table(
            "homoclinic_level",
            ["t", "a0", "b0", "energy"],
            np.column_stack([t, a, b, level]),
        )

        eq = np.array(equilibria(params))
        out.table(
            "equilibria",
            ["a0", "energy"],
            np.column_stack([eq, planar_energy(eq, np.zeros_like(eq), params)]),
        )

        etas = cfg.float_list("etas", orbit.amplitude * np.array([0.4, 0.85, 1.15]))
        closure_tol = cfg.option("closure_tol", 1e-5)
        series = [Series("K0 (a0>0)", a, b), Series("K0 (a0<0)", -a, -b)]
        rows = []
        for eta in etas:
            t_ret, a_ret = planar_first_return(
                eta, params, dt=cfg.scheme.dt, order=cfg.scheme.order
            )
            out.check(f"K_eta={eta:g} returns", t_ret, 0.0, "gt")
            curve = planar_orbit(
                eta,
                params,
                T=t_ret,
                dt=cfg.scheme.dt,
                order=cfg.scheme.order,
                drift_tolerance=cfg.scheme.drift_tolerance,
            )
            series.append(Series(f"K_eta={eta:g}", curve.a0, curve.b0))
            rows.append([eta, t_ret, a_ret, float(curve.energy[0]), curve.drift])
            out.check(f"K_eta={eta:g} closes", abs(a_ret - eta), closure_tol)

        out.table(
            "level_orbits",
            ["eta", "return_time", "a0_return", "energy", "energy_drift"],
            rows,
        )
        out.plot(
            "phase_portrait",
            series,
            title=f"Mode-0 phase portrait, m={m:g}, p={params.p}",
            xlabel="a0",
            ylabel="b0",
        )
        out.check("homoclinic planar energy", float(np.max(np.abs(level))), 1e-10)


@register_experiment
class HomoclinicTrack(Experiment):
    r"""Integrates the full system from ``h(0)`` and compares with the
    closed-form orbit"""

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        orbit = HomoclinicOrbit(params)
        T = cfg.option("T", 5.0 / params.m)
        X0 = orbit.state(0.0)
        traj = integrate(X0, T, params, cfg.scheme)

        ref_a = orbit.alpha(traj.times)
        ref_b = orbit.beta(traj.times)
        err = np.hypot(traj.A[:, 0] - ref_a, traj.B[:, 0] - ref_b)
        err_c = center_norms(traj.A, traj.B, spectrum_for(params).lam)
        logger.info(f"homoclinic-track horizon T = {T:g} (dt = {cfg.scheme.dt:g})")
        out.table(
            "track_summary",
            ["T", "dt", "order", "steps", "max_error", "max_center"],
            [
                [
                    T,
                    cfg.scheme.dt,
                    cfg.scheme.order,
                    len(traj) - 1,
                    float(err.max()),
                    float(err_c.max()),
                ]
            ],
        )

        write_trajectory_csv(traj, out.file("trajectory.csv"))
        if cfg.option("binary", True, bool):
            path = out.file("trajectory.bin")
            write_trajectory_binary(traj, path)
            back = read_trajectory_binary(path, params)
            out.check(
                "binary dump round trip",
                float(
                    np.max(np.abs(back.A - traj.A)) + np.max(np.abs(back.B - traj.B))
                ),
                0.0,
                "eq",
            )

        stride = max(1, len(traj) // 2000)
        out.plot(
            "homoclinic_track",
            [
                Series("integrated a0", traj.times[::stride], traj.A[::stride, 0]),
                Series("closed form α", traj.times[::stride], ref_a[::stride]),
            ],
            title=f"Integrated mode 0 against the homoclinic orbit, T={T:g}",
            xlabel="t",
            ylabel="a0",
        )
        out.plot(
            "track_error",
            [Series("|X_h - h|", traj.times[::stride], err[::stride])],
            title="Tracking error",
            xlabel="t",
            ylabel="error",
            logy=True,
        )

        H = traj.observables["H"]
        h_scale = 0.5 * (params.m * orbit.amplitude) ** 2
        report = apriori_bound_report(traj, params)
        out.check(
            "homoclinic tracking error", float(err.max()), cfg.option("tol", 1e-5)
        )
        out.check("center part stays zero", float(err_c.max()), 1e-12)
        out.check(
            "energy drift",
            float(np.max(np.abs(H - H[0]))),
            cfg.scheme.drift_tolerance * max(abs(traj.H0), h_scale),
        )
        out.check("a-priori bound", report.max_lhs, report.bound + report.slack)


@register_experiment
class LinearizedScatter(Experiment):
    r"""Scattering of the linearized center dynamics to invariant tori"""

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        m = params.m
        entries = _elliptic_entries(cfg, "modes", [1], params)
        dim = spectrum_for(params).dim
        a = np.zeros(dim)
        a[entries] = cfg.option("amplitude", 1.0)
        Zc0 = State(a, np.zeros(dim))
        T_trunc = cfg.option("T_trunc", 60.0 / m)
        dt = cfg.option("dt", 1e-2)

        inv = scatter_asymptotics(Zc0, params, T_trunc, dt=dt)
        inv2 = scatter_asymptotics(Zc0, params, 2.0 * T_trunc, dt=dt)
        free = scatter_asymptotics(Zc0, params, T_trunc, dt=dt, potential=False)

        idx = np.asarray(entries) - 1
        out.table(
            "torus_invariants",
            ["entry", "omega", "a_plus", "b_plus", "c", "c_2T", "c_free"],
            np.column_stack(
                [
                    entries,
                    inv.omega[idx],
                    inv.a_plus[idx],
                    inv.b_plus[idx],
                    inv.c[idx],
                    inv2.c[idx],
                    free.c[idx],
                ]
            ),
        )
        out.table(
            "scatter_checkpoints",
            ["t", "residual", "bound"],
            np.column_stack([inv.checkpoints, inv.residuals, inv.residual_bounds]),
        )

        times = uniform_grid(
            0.0, cfg.option("T_plot", 40.0 / m), cfg.option("dt_plot", 0.05)
        )
        drift = torus_level_drift(Zc0, params, times)
        out.plot(
            "torus_levels",
            [
                Series(f"c_{n}(t)", drift["times"], drift["levels"][:, n - 1])
                for n in entries
            ],
            title="Torus levels along the linearized flow",
            xlabel="t",
            ylabel="c_n",
        )

        out.check(
            "scattering residual at last checkpoint",
            float(inv.residuals[-1]),
            cfg.option("residual_tol", 1e-6),
        )
        out.check(
            "torus levels at T and 2T",
            float(np.max(np.abs(inv.c - inv2.c))),
            cfg.option("level_tol", 1e-8),
        )


@register_experiment
class HyperbolicBasis(Experiment):
    r"""Table of σ, ρ and their duals with growth and decay fits"""

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        m = params.m
        T_max = cfg.option("T_max", 30.0 / m)
        basis = hyperbolic_basis(params, T_max, dt=cfg.option("dt", 1e-2))
        t = basis.times
        out.table(
            "hyperbolic_basis",
            [
                "t",
                "sigma_a",
                "sigma_b",
                "rho_a",
                "rho_b",
                "sigma_star_a",
                "sigma_star_b",
                "rho_star_a",
                "rho_star_b",
            ],
            np.column_stack(
                [t, basis.sigma, basis.rho, basis.sigma_star, basis.rho_star]
            ),
        )

        t0 = cfg.option("fit_t0", 5.0 / m)
        t1 = min(cfg.option("fit_t1", 15.0 / m), T_max)
        keep = (t >= t0) & (t <= t1)
        expected = {"sigma": -m, "rho": m, "sigma_star": m, "rho_star": -m}
        rows = []
        for k, (name, rate0) in enumerate(expected.items()):
            values = np.linalg.norm(getattr(basis, name)[keep], axis=1)
            rate, prefactor = fit_exponential_rate(t[keep], values)
            rows.append([k, rate, rate0, prefactor, basis.constants[name]])
        out.table("growth_fits", ["path", "rate", "expected", "prefactor", "C"], rows)

        reduced = rho_by_reduction(basis, t_ref=cfg.option("t_ref", 1.0))
        span = (t >= cfg.option("t_ref", 1.0)) & (t <= t1)
        rel = np.linalg.norm(reduced[span] - basis.rho[span], axis=1) / np.linalg.norm(
            basis.rho[span], axis=1
        )

        stride = max(1, len(t) // 1500)
        out.plot(
            "basis_growth",
            [
                Series(
                    name,
                    t[::stride],
                    np.linalg.norm(getattr(basis, name), axis=1)[::stride],
                )
                for name in expected
            ],
            title="Hyperbolic basis and duals",
            xlabel="t",
            ylabel="norm",
            logy=True,
        )

        sigma0 = float(np.max(np.abs(basis.sigma[0] - [0.0, 1.0])))
        rho0 = float(np.max(np.abs(basis.rho[0] - [1.0, 0.0])))
        out.check("sigma(0) = (0, 1)", sigma0, 0.0, "eq")
        out.check("rho(0) = (1, 0)", rho0, 0.0, "eq")
        out.check("wronskian drift", basis.wronskian_drift, 1e-10)
        out.check("duality defect", basis.duality_defect(), 1e-9)
        for (name, rate0), row in zip(expected.items(), rows):
            out.check(f"{name} rate", abs(row[1] - rate0) / m, 0.02)
        out.check(
            "reduction-of-order agreement",
            float(rel.max()),
            cfg.option("reduction_tol", 1e-6),
        )


def _ode_bound_point(args):
    n, params, T, dt = args
    return mode_sup_ratio(n, (1.0, 0.0), params, T, dt=dt)


@register_experiment
class OdeBound(Experiment):
    r"""Boundedness certificate of the linearized center modes against the
    measured growth"""

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        entries = _elliptic_entries(cfg, "modes", [1, 3, 7, 15], params)
        T = cfg.option("T", 200.0)
        dt = cfg.option("dt", 1e-2)
        cert = boundedness_certificate(None, None, params)
        out.table(
            "certificate", ["k", "bound", "total"], [[cert.k, cert.bound, cert.total]]
        )
        partition = np.zeros((cert.k, 2))
        partition[:, 0] = np.arange(1, cert.k + 1)
        partition[:, 1] = cert.partition
        out.table("partition", ["j", "T_j"], partition)

        omega = mode_frequencies(params)
        lam = spectrum_for(params).lam
        ratios = sweep(
            _ode_bound_point, [(n, params, T, dt) for n in entries], jobs, "ode-bound"
        )
        rows = []
        for n, ratio in zip(entries, ratios):
            scaled = boundedness_certificate(None, None, params, omega=omega[n - 1])
            rows.append([n, lam[n], omega[n - 1], ratio, cert.bound, scaled.bound])
        out.table(
            "measured_growth",
            ["entry", "lambda", "omega", "measured_ratio", "bound", "scaled_bound"],
            rows,
        )
        rows = np.asarray(rows)
        out.plot(
            "measured_growth_plot",
            [
                Series("measured", rows[:, 1], rows[:, 3]),
                Series("certificate", rows[:, 1], rows[:, 4]),
            ],
            title="Growth of linearized center modes",
            xlabel="lambda",
            ylabel="sup ratio",
            logy=True,
        )

        if "expect_k" in cfg.options:
            out.check("certificate k", cert.k, cfg.option("expect_k", 0), "eq")
        empirical = cfg.option("empirical_bound", 3.0)
        for n, _, _, ratio, bound, scaled in rows.tolist():
            out.check(f"entry {int(n)} below certificate", ratio, bound)
            out.check(f"entry {int(n)} below scaled certificate", ratio, scaled)
            out.check(f"entry {int(n)} empirical bound", ratio, empirical)


@register_experiment
class Shadow(Experiment):
    r"""Center-stable solutions and their shadowing tubes"""

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        trunc = self.truncation(cfg)
        eps2 = trunc.epsilon ** 2
        spectrum = spectrum_for(params)
        norm_c = cfg.option("vc_scale", 0.5) * eps2
        if cfg.option("center", "mode") == "random":
            rng = np.random.default_rng(cfg.seed)
            X = random_state(spectrum, decay=1.0, rng=rng)
            a, b = X.a.copy(), X.b.copy()
            a[0] = b[0] = 0.0
            scale = norm_c / state_norm(State(a, b), spectrum)
            V_c = State(scale * a, scale * b)
        else:
            entries = _elliptic_entries(cfg, "modes", [1], params)
            V_c = _center_datum(params, entries, norm_c)
        V_s = cfg.option("vs_scale", 0.5) * eps2

        methods = cfg.option("methods", "fixed_point,shooting").split(",")
        methods = [m.strip() for m in methods if m.strip()]
        solutions = {}
        for method in tqdm.tqdm(methods, desc="shadow", leave=False):
            try:
                solutions[method] = solve_center_stable(V_c, V_s, params, trunc, method)
            except ValueError as e:
                raise ConfigError(f"exp.methods: {e}") from e

        C = cfg.option("C", 10.0)
        series = []
        for method, sol in solutions.items():
            traj = sol.Z_traj
            out.table(
                f"shadow_{method}",
                ["t", "Zh_a", "Zh_b", "norm_h", "norm_c"],
                np.column_stack(
                    [
                        traj.times,
                        traj.A[:, 0],
                        traj.B[:, 0],
                        traj.observables["norm_h"],
                        traj.observables["norm_c"],
                    ]
                ),
            )
            obs = traj.observables
            series.append(Series(f"|Z_h| {method}", traj.times, obs["norm_h"]))
            series.append(Series(f"‖Z_c‖ {method}", traj.times, obs["norm_c"]))
            d = sol.diagnostics
            out.check(f"{method} stable boundary datum", d["bc_stable"], trunc.fp_tol)
            out.check(f"{method} center boundary datum", d["bc_center"], trunc.fp_tol)
            out.check(f"{method} sup|Z_h|/eps^2", d["C_h"], C)
            out.check(f"{method} sup‖Z_c‖/eps^2 on [0, 1/eps]", d["C_c"], C)

        first = next(iter(solutions.values()))
        t = first.times
        series.append(Series("delta", t[[0, -1]], [trunc.delta, trunc.delta]))
        series.append(Series("C eps^2", t[[0, -1]], [C * eps2, C * eps2]))
        out.plot(
            "shadow_tube",
            series,
            title=f"Shadowing tube, eps={trunc.epsilon:g}",
            xlabel="t",
            ylabel="norm",
            logy=True,
        )
        out.table(
            "shadow_summary",
            ["method", "V_u", "iterations", "C_h", "C_c"],
            [
                [
                    k,
                    sol.V_u,
                    sol.iterations,
                    sol.diagnostics["C_h"],
                    sol.diagnostics["C_c"],
                ]
                for k, sol in enumerate(solutions.values())
            ],
        )

        if len(solutions) > 1:
            sols = list(solutions.values())
            gap = solution_distance(sols[0], sols[1], t_max=0.5 * trunc.T_horizon)
            out.check("methods agree", gap, 10.0 * max(trunc.fp_tol, trunc.shoot_tol))
        target = solutions.get("shooting", first)
        report = truncation_consistency(target, params, trunc)
        if report.in_tube:
            out.check(
                "cutoff removal defect",
                report.max_defect,
                cfg.option("defect_tol", 1e-8),
            )
        else:
            logger.warning("Orbit leaves the tube; cutoff removal not checked")


def _psi_point(args):
    params, trunc, a, scale = args
    V_c = State(scale * a, np.zeros_like(a))
    psi = center_manifold_psi(V_c, params, trunc)
    return psi.a0, psi.b0


@register_experiment
class PsiScan(Experiment):
    r"""Scaling of the center-manifold graph Ψ near the origin"""

    default_epsilon = 0.1

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        trunc = self.truncation(cfg)
        entries = _elliptic_entries(cfg, "modes", [1, 3], params)
        direction = _center_datum(params, entries, 1.0)
        scales = np.logspace(
            np.log10(cfg.option("s_min", 1e-3)),
            np.log10(cfg.option("s_max", 1e-2)),
            cfg.option("points", 5),
        )
        if scales[-1] > trunc.center_radius:
            raise ConfigError(
                f"exp.s_max = {scales[-1]:g} exceeds the admissible center radius "
                f"{trunc.center_radius:g}; raise trunc.epsilon or trunc.center_radius"
            )

        zero = center_manifold_psi(State.zeros(direction.dim), params, trunc)
        values = sweep(
            _psi_point,
            [(params, trunc, direction.a, s) for s in scales],
            jobs,
            "psi-scan",
        )
        values = np.asarray(values)
        norms = np.hypot(values[:, 0], values[:, 1])
        slope = fit_log_slope(scales, norms)
        out.table(
            "psi_scan",
            ["s", "psi_a", "psi_b", "psi_norm"],
            np.column_stack([scales, values, norms]),
        )
        out.plot(
            "psi_scaling",
            [Series("|Ψ(s V_c)|", scales, norms)],
            title=f"Center manifold graph, fitted slope {slope:.3f}",
            xlabel="s",
            ylabel="|Psi|",
            logx=True,
            logy=True,
        )

        lyap_cfg = attr.evolve(trunc, T_horizon=cfg.option("lyapunov_T", 100.0))
        lyap = lyapunov_within_Wc(
            direction * float(scales[-1]),
            params,
            lyap_cfg,
            constant=cfg.option("lyapunov_C", 3.0),
            j_tolerance=cfg.option("lyapunov_j_tol", 0.05),
            h_constant=cfg.option("lyapunov_h_C", 10.0),
        )
        out.table(
            "lyapunov",
            [
                "sup_ratio",
                "inf_ratio",
                "sup_h",
                "h_over_delta3",
                "j_drift",
                "flow_defect",
            ],
            [
                [
                    lyap.sup_ratio,
                    lyap.inf_ratio,
                    lyap.sup_h,
                    lyap.h_over_delta3,
                    lyap.j_drift,
                    lyap.flow_defect,
                ]
            ],
        )

        out.check("Psi(0) vanishes", zero.norm(), 0.0, "eq")
        out.check("Psi slope", slope, cfg.option("slope_min", 1.9), "ge")
        out.check(
            "Psi momentum on reversible data",
            float(np.max(np.abs(values[:, 1]))),
            trunc.fp_tol,
        )
        out.check("Lyapunov sup ratio", lyap.sup_ratio, lyap.constant)
        out.check("Lyapunov inf ratio", lyap.inf_ratio, 1.0 / lyap.constant, "ge")
        out.check("Lyapunov J drift", lyap.j_drift, lyap.j_tolerance, "lt")
        out.check("Lyapunov sup|X_h|/delta^3", lyap.h_over_delta3, lyap.h_constant)


def _heteroclinic_point(args):
    params, trunc, a, method = args
    orbit = reversible_heteroclinic(State(a, np.zeros_like(a)), params, trunc, method)
    lam = spectrum_for(params).lam
    return {
        "norm": state_norm(State(a, np.zeros_like(a)), spectrum_for(params)),
        "V_u": orbit.solution.V_u,
        "symmetry_residual": orbit.symmetry_residual,
        "backward_mismatch": orbit.backward_mismatch,
        "tracking": orbit.tracking_constant,
        "times": orbit.times,
        "a0": orbit.A[:, 0],
        "b0": orbit.B[:, 0],
        "norm_c": center_norms(orbit.A, orbit.B, lam),
    }


@register_experiment
class Heteroclinic(Experiment):
    r"""Reversible orbits leaving and reaching the center manifold"""

    default_epsilon = 0.04

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        trunc = self.truncation(cfg)
        entries = _elliptic_entries(cfg, "modes", [1], params)
        norms = cfg.float_list("norms", [1e-4, 3e-4, 1e-3])
        direction = _center_datum(params, entries, 1.0)
        method = cfg.option("method", "fixed_point")
        results = sweep(
            _heteroclinic_point,
            [(params, trunc, n * direction.a, method) for n in norms],
            jobs,
            "heteroclinic",
        )

        out.table(
            "heteroclinic_summary",
            [
                "norm_fc",
                "V_u",
                "symmetry_residual",
                "backward_mismatch",
                "tracking_constant",
            ],
            [
                [
                    r["norm"],
                    r["V_u"],
                    r["symmetry_residual"],
                    r["backward_mismatch"],
                    r["tracking"],
                ]
                for r in results
            ],
        )
        largest = results[int(np.argmax(norms))]
        orbit = HomoclinicOrbit(params)
        out.table(
            "heteroclinic_orbit",
            ["t", "a0", "b0", "norm_c"],
            np.column_stack(
                [largest["times"], largest["a0"], largest["b0"], largest["norm_c"]]
            ),
        )
        out.plot(
            "heteroclinic_deviation",
            [
                Series(
                    f"|f_c|={r['norm']:g}",
                    r["times"],
                    np.abs(r["a0"] - orbit.alpha(r["times"])) / r["norm"],
                )
                for r in results
            ],
            title="Deviation from the homoclinic, scaled by |f_c|",
            xlabel="t",
            ylabel="|a0 - alpha| / |f_c|",
        )

        mismatch_tol = cfg.option("mismatch_tol", 1e-8)
        for r in results:
            label = f"|f_c|={r['norm']:g}"
            residual, mismatch = r["symmetry_residual"], r["backward_mismatch"]
            out.check(f"{label} symmetry residual", residual, trunc.fp_tol)
            out.check(f"{label} backward mismatch", mismatch, mismatch_tol)
        tracking = np.array([r["tracking"] for r in results])
        if len(tracking) > 1:
            out.check(
                "tracking constant spread",
                float(tracking.max() / tracking.min()),
                cfg.option("tracking_spread", 2.0),
            )


@register_experiment
class ConvergeWc(Experiment):
    r"""Exponential approach of a center-stable orbit to the center manifold"""

    default_epsilon = 0.1

    def run(self, cfg, out, jobs=1):
        params = cfg.model
        trunc = self.truncation(cfg)
        eps2 = trunc.epsilon ** 2
        entries = _elliptic_entries(cfg, "modes", [1], params)
        V_c = _center_datum(params, entries, cfg.option("vc_scale", 0.5) * eps2)
        V_s = cfg.option("vs_scale", 0.5) * eps2
        method = cfg.option("method", "fixed_point")
        sol = solve_center_stable(V_c, V_s, params, trunc, method)
        report = convergence_to_Wc(
            sol, params, trunc, samples=cfg.option("samples", 12)
        )
        fit = report.prefactor * np.exp(-report.rate * report.times)

        out.table(
            "converge_wc",
            ["t", "distance", "fit"],
            np.column_stack([report.times, report.distances, fit]),
        )
        out.plot(
            "converge_wc_fit",
            [
                Series("d(t)", report.times, report.distances),
                Series("fit", report.times, fit),
            ],
            title=f"Distance to the center manifold, rate {report.rate:.4g}",
            xlabel="t",
            ylabel="d",
            logy=True,
        )
        out.check("decay rate", report.rate, report.required_rate, "ge")
        out.check("d(t_eps)/eps^2", report.d_eps_ratio, cfg.option("C", 10.0))

        consistency = truncation_consistency(sol, params, trunc)
        out.check("orbit inside the cutoff tube", int(consistency.in_tube), 1, "eq")
        out.check(
            "cutoff removal defect",
            consistency.max_defect,
            cfg.option("defect_tol", 1e-6),
        )
