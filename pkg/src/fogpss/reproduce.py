"""Named reproduction runs with pass/fail verdicts.

Each ``run_*`` function executes one experiment with the bundled settings and
returns a :class:`Report`: a list of :class:`Verdict` lines plus any traces
worth writing to disk.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .abm import FdeProblem, abm_solve, estimate_convergence_order
from .config import bundled_config_path, load_config
from .controllers import PssGains
from .fraccalc import mittag_leffler
from .plants import RobotPlant, catalog_function, cosine_reference
from .simkit import RobotExperiment, pss_robot_experiment, simulate

__all__ = [
    "Verdict",
    "Report",
    "REPORTED_BETA_HAT",
    "REPORTED_ENTRY_TIME",
    "default_robot_experiment",
    "run_fig5",
    "run_fig6",
    "run_fig7",
    "run_pss",
    "run_order",
    "RUNNERS",
    "ml_problem",
    "ml_reference",
    "solve_fde_demo",
]

# externally stated values for the bundled example, reported for comparison only
REPORTED_BETA_HAT = 0.04
REPORTED_ENTRY_TIME = 30.0


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str

    def __str__(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


@dataclass
class Report:
    title: str
    verdicts: list[Verdict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    traces: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.verdicts.append(Verdict(name, bool(passed), detail))

    def text(self) -> str:
        lines = [self.title] + [str(v) for v in self.verdicts] + [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _fig5_trace(h: float | None = None, T: float | None = None, negate_u: bool | None = None):
    cfg = load_config(bundled_config_path("paper_fig5.cfg")).sim
    overrides = {k: v for k, v in (("h", h), ("T", T), ("negate_u", negate_u)) if v is not None}
    if overrides:
        cfg = replace(cfg, **overrides)
    start = time.perf_counter()
    trace = simulate(cfg)
    return cfg, trace, time.perf_counter() - start


def run_fig5(h=None, T=None, negate_u=None) -> Report:
    cfg, trace, elapsed = _fig5_trace(h, T, negate_u)
    rep = Report("fig5: true tracking error of the fractional self-support loop")
    radius = trace.bound_radius
    late = trace.t >= 5.0
    worst = float(np.max(np.abs(trace.x_e[late]))) if late.any() else math.nan
    rep.add("bound radius", worst <= radius, f"max |x_e| for t >= 5 s is {worst:.4g} vs radius {radius:.4g}")
    rep.add("runtime", elapsed <= 10.0, f"{elapsed:.2f} s (limit 10 s)")
    t_in = trace.entry_time(0.3)
    ok = t_in is not None and 5.0 <= t_in <= 50.0
    shown = "never" if t_in is None else f"{t_in:.2f} s"
    rep.add("entry time into |x_e| <= 0.3 within [5, 50] s", ok, f"{shown} (reported: about {REPORTED_ENTRY_TIME:g} s)")
    rep.notes.append(
        "exact entry-time agreement is not expected: plant coefficients and reference are chosen defaults"
    )
    ctrl = cfg.controller
    rep.notes.append(f"beta_hat from its definition = {ctrl.beta_hat:.4f}; reported value {REPORTED_BETA_HAT}")
    rep.traces["fig5"] = trace
    return rep


def run_fig6(h=None, T=None, negate_u=None) -> Report:
    cfg, trace, _ = _fig5_trace(h, T, negate_u)
    rep = Report("fig6: measured tracking error")
    eps0 = cfg.controller.epsilon0
    late = trace.t >= 25.0
    worst = float(np.max(np.abs(trace.xe_tilde[late]))) if late.any() else math.nan
    rep.add("measured error inside epsilon0 for t >= 25 s", worst <= eps0, f"max |x~_e| = {worst:.4g} vs {eps0:g}")
    t_in = trace.entry_time(eps0, "xe_tilde")
    rep.notes.append(f"measured error enters the epsilon0 ball at {t_in} s")
    rep.traces["fig6"] = trace
    return rep


def run_fig7(h=None, T=None, negate_u=None) -> Report:
    cfg, trace, _ = _fig5_trace(h, T, negate_u)
    rep = Report("fig7: control input")
    finite = bool(np.all(np.isfinite(trace.u)))
    rep.add("control finite", finite, f"max |u| = {np.max(np.abs(trace.u)):.4g}")
    late = trace.t >= 5.0
    u_late = float(np.max(np.abs(trace.u[late])))
    rep.notes.append(f"max |u| for t >= 5 s = {u_late:.4g}; self-support estimate u_max = {cfg.controller.u_max:g}")
    rep.traces["fig7"] = trace
    return rep


def default_robot_experiment(noise: bool = True, h: float = 0.01, T: float = 20.0, negate_u: bool = True):
    """Two decoupled joints tracking cosine references under the integer self-support law."""
    M = np.diag([1.0, 0.5])
    d = [catalog_function("sin-product", amplitude=0.2), catalog_function("sin-product", amplitude=0.2)]
    robot = RobotPlant(M, d, [0.2, 0.2])
    refs = [cosine_reference(0.5, 1.0, 1.0, 1.0), cosine_reference(0.3, 0.5, 1.0, 1.0)]
    # torque needed to follow the reference plus the disturbance bound
    u_max = np.array([1.0 * 0.5 * 1.0**2 + 0.2, 0.5 * 0.3 * 0.5**2 + 0.2])
    if noise:
        omegas = [catalog_function("cos-time", amplitude=0.05, freq=1.0)] * 2
        c1, c2 = 0.05, 0.5
    else:
        omegas = [catalog_function("zero")] * 2
        c1, c2 = 0.0, 0.0
    gains = PssGains(b=[20.0, 10.0], rho=[5.0, 5.0], epsilon=0.2, u_max=u_max)
    return RobotExperiment(robot, refs, omegas, c1, c2, gains, h, T, [-1.0, 1.0], [0.0, 0.0], negate_u)


def run_pss(h=None, T=None, negate_u=None) -> Report:
    rep = Report("pss: two-joint integer-order self-support experiment")
    kw = {k: v for k, v in (("h", h), ("T", T), ("negate_u", negate_u)) if v is not None}
    for label, noise in (("noisy", True), ("noise-free", False)):
        exp = default_robot_experiment(noise, **kw)
        tr = pss_robot_experiment(exp)
        for i in range(exp.robot.n):
            ent = tr.entry_times[i]
            rep.add(
                f"{label} joint {i} enters radius {tr.radius[i]:.4g}",
                ent is not None,
                "never" if ent is None else f"at {ent:.2f} s and stays",
            )
            rep.add(
                f"{label} joint {i} derivative bound",
                bool(tr.derivative_ok[i]),
                f"max |de/dt| inside = {tr.max_inside_edot[i]:.4g} vs {tr.derivative_bound[i]:.4g} (+10%)",
            )
        if not noise:
            eps = exp.gains.epsilon
            rep.add("noise-free radius equals epsilon", np.allclose(tr.radius, eps), f"radii {tr.radius} vs {eps}")
        rep.traces[f"pss-{label}"] = tr
    return rep


def ml_problem(alpha: float, lam: float = -1.0, x0: float = 1.0, T: float = 1.0, N: int = 1000) -> FdeProblem:
    """``D^alpha x = lam * x`` with ``x(0) = x0`` (and zero higher initial derivatives)."""
    init = [x0] + [0.0] * (math.ceil(alpha) - 1)
    return FdeProblem(alpha, lambda t, x: lam * x, init, T, N)


def ml_reference(alpha: float, lam: float = -1.0, x0: float = 1.0):
    return lambda t: x0 * mittag_leffler(alpha, lam * np.asarray(t) ** alpha)


def run_order(Ns=(250, 500, 1000, 2000), alphas=(0.3, 0.5, 0.8)) -> Report:
    rep = Report("order: predictor-corrector convergence on D^a x = -x against the Mittag-Leffler solution")
    start = time.perf_counter()
    for a in alphas:
        p = min(2.0, 1.0 + a)
        est = estimate_convergence_order(ml_problem(a), ml_reference(a), Ns, norm="max")
        fin = estimate_convergence_order(ml_problem(a), ml_reference(a), Ns, norm="final")
        rep.add(
            f"alpha={a} max-norm slope",
            abs(est.order - p) <= 0.3,
            f"{est.order:.3f} vs p={p:.2f} (end-point slope {fin.order:.3f})",
        )
    elapsed = time.perf_counter() - start
    rep.add("runtime", elapsed <= 30.0, f"{elapsed:.1f} s (limit 30 s)")
    rep.notes.append(
        "the solution has a t**alpha singularity at 0, which limits the max-norm rate for small alpha"
    )
    return rep


RUNNERS = {"fig5": run_fig5, "fig6": run_fig6, "fig7": run_fig7, "pss": run_pss, "order": run_order}


def solve_fde_demo(alpha: float, lam: float, x0: float, T: float, N: int):
    """Solve the scalar linear test equation and compare with its closed form."""
    sol = abm_solve(ml_problem(alpha, lam, x0, T, N))
    ref = ml_reference(alpha, lam, x0)(sol.t)
    return sol, ref, float(np.max(np.abs(sol.states[:, 0] - ref)))
