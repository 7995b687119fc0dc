"""Plants, reference trajectories and the measurement-error channel.

Disturbances and measurement errors are drawn from a small catalog of named,
parameterised functions (:data:`CATALOG`) so experiment files stay
reproducible. Every bound the controllers rely on is asserted at run time;
a violation raises :class:`AssumptionViolation` instead of being clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AssumptionViolation, BlowUpError

__all__ = [
    "CatalogFunction",
    "CATALOG",
    "catalog_function",
    "PlantBounds",
    "FirstOrderPlant",
    "ReferenceSpec",
    "cosine_reference",
    "constant_reference",
    "MeasurementModel",
    "RobotPlant",
    "plant_step_rk4",
    "robot_step_rk4",
    "estimate_u_max",
    "reference_eval",
]


# --- function catalog -------------------------------------------------------

def _zero(x, t, p):
    return 0.0


def _constant(x, t, p):
    return p["value"]


def _sin_product(x, t, p):
    return p["amplitude"] * math.sin(p.get("gain", 1.0) * x * t)


def _cos_product(x, t, p):
    return p["amplitude"] * math.cos(p.get("gain", 1.0) * x * t)


def _sin_time(x, t, p):
    return p["amplitude"] * math.sin(p.get("freq", 1.0) * t + p.get("phase", 0.0))


def _cos_time(x, t, p):
    return p["amplitude"] * math.cos(p.get("freq", 1.0) * t + p.get("phase", 0.0))


# name -> (function, required params, optional params, sup-norm bound)
CATALOG: dict[str, tuple[Callable, tuple[str, ...], tuple[str, ...], Callable[[dict], float]]] = {
    "zero": (_zero, (), (), lambda p: 0.0),
    "constant": (_constant, ("value",), (), lambda p: abs(p["value"])),
    "sin-product": (_sin_product, ("amplitude",), ("gain",), lambda p: abs(p["amplitude"])),
    "cos-product": (_cos_product, ("amplitude",), ("gain",), lambda p: abs(p["amplitude"])),
    "sin-time": (_sin_time, ("amplitude",), ("freq", "phase"), lambda p: abs(p["amplitude"])),
    "cos-time": (_cos_time, ("amplitude",), ("freq", "phase"), lambda p: abs(p["amplitude"])),
}


@dataclass(frozen=True)
class CatalogFunction:
    """A catalog entry ``f(x, t)`` with fixed parameters.

    ``x`` is the state for disturbances and the true tracking error for
    measurement-error functions; time-only entries ignore it.
    """

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in CATALOG:
            raise KeyError(f"unknown catalog function {self.name!r}; known: {sorted(CATALOG)}")
        _, required, optional, _ = CATALOG[self.name]
        missing = [k for k in required if k not in self.params]
        unknown = [k for k in self.params if k not in required + optional]
        if missing:
            raise KeyError(f"catalog function {self.name!r} missing parameters {missing}")
        if unknown:
            raise KeyError(f"catalog function {self.name!r} got unknown parameters {unknown}")
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})

    def __call__(self, x: float, t: float) -> float:
        return float(CATALOG[self.name][0](x, t, self.params))

    @property
    def sup(self) -> float:
        """Supremum of ``|f|`` over all arguments."""
        return float(CATALOG[self.name][3](self.params))


def catalog_function(name: str, **params: float) -> CatalogFunction:
    return CatalogFunction(name, params)


# --- first-order plant ------------------------------------------------------

@dataclass(frozen=True)
class PlantBounds:
    a_lo: float
    a_hi: float
    b_lo: float
    b_hi: float
    d_bar: float

    def __post_init__(self) -> None:
        for name in ("a_lo", "a_hi", "b_lo", "b_hi", "d_bar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"plant bound {name} must be positive")
        if self.a_lo > self.a_hi or self.b_lo > self.b_hi:
            raise ValueError("plant bounds must satisfy lo <= hi")


@dataclass(frozen=True)
class FirstOrderPlant:
    """``x' = -a_p x + b_p u + d(x, t)`` with uncertain but bounded parameters."""

    a_p: float
    b_p: float
    disturbance: Callable[[float, float], float]
    bounds: PlantBounds

    def __post_init__(self) -> None:
        b = self.bounds
        if not b.a_lo <= abs(self.a_p) <= b.a_hi:
            raise AssumptionViolation("plant bounds", f"|a_p|={abs(self.a_p)} outside [{b.a_lo}, {b.a_hi}]")
        if not b.b_lo <= abs(self.b_p) <= b.b_hi:
            raise AssumptionViolation("plant bounds", f"|b_p|={abs(self.b_p)} outside [{b.b_lo}, {b.b_hi}]")
        sup = getattr(self.disturbance, "sup", None)
        if sup is not None and sup > b.d_bar:
            raise AssumptionViolation("plant bounds", f"disturbance amplitude {sup} exceeds d_bar={b.d_bar}")

    def disturbance_checked(self, x: float, t: float) -> float:
        d = self.disturbance(x, t)
        if abs(d) > self.bounds.d_bar * (1 + 1e-12):
            raise AssumptionViolation("plant bounds", f"|d|={abs(d):.6g} > d_bar={self.bounds.d_bar}", t, d)
        return d

    def rhs(self, x: float, u: float, t: float) -> float:
        return -self.a_p * x + self.b_p * u + self.disturbance_checked(x, t)


def plant_step_rk4(plant: FirstOrderPlant, x: float, u: float, t: float, h: float) -> float:
    """One classical RK4 step of the first-order plant with ``u`` held over the step."""
    if not h > 0:
        raise ValueError("h must be positive")
    if not math.isfinite(u):
        raise BlowUpError("non-finite control input", t)
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = plant.rhs(x, u, t)
        k2 = plant.rhs(x + 0.5 * h * k1, u, t + 0.5 * h)
        k3 = plant.rhs(x + 0.5 * h * k2, u, t + 0.5 * h)
        k4 = plant.rhs(x + h * k3, u, t + h)
        x_new = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not math.isfinite(x_new):
        raise BlowUpError("plant state became non-finite", t + h)
    return x_new


# --- reference trajectories -------------------------------------------------

@dataclass(frozen=True)
class ReferenceSpec:
    """Desired trajectory with known position bound ``b1`` and velocity bound ``b2``.

    Missing derivatives are obtained by central differences.
    """

    x_d: Callable[[float], float]
    b1: float
    b2: float
    xdot_d: Callable[[float], float] | None = None
    xddot_d: Callable[[float], float] | None = None
    label: str = "custom"

    def __post_init__(self) -> None:
        if not (self.b1 > 0 and self.b2 > 0):
            raise ValueError("reference bounds b1, b2 must be positive")

    def velocity(self, t: float) -> float:
        if self.xdot_d is not None:
            return float(self.xdot_d(t))
        eps = 1e-6
        return (self.x_d(t + eps) - self.x_d(max(t - eps, 0.0))) / (t + eps - max(t - eps, 0.0))

    def acceleration(self, t: float) -> float:
        if self.xddot_d is not None:
            return float(self.xddot_d(t))
        eps = 1e-4
        lo = max(t - eps, 0.0)
        return (self.velocity(t + eps) - self.velocity(lo)) / (t + eps - lo)


def cosine_reference(
    amplitude: float, freq: float, b1: float, b2: float, phase: float = 0.0, offset: float = 0.0
) -> ReferenceSpec:
    """``x_d(t) = offset + amplitude * cos(freq*t + phase)``."""

    def x_d(t):
        return offset + amplitude * math.cos(freq * t + phase)

    def v(t):
        return -amplitude * freq * math.sin(freq * t + phase)

    def a(t):
        return -amplitude * freq**2 * math.cos(freq * t + phase)

    return ReferenceSpec(x_d, b1, b2, v, a, label=f"cosine(A={amplitude:g}, w={freq:g})")


def constant_reference(value: float, b1: float, b2: float) -> ReferenceSpec:
    return ReferenceSpec(lambda t: value, b1, b2, lambda t: 0.0, lambda t: 0.0, label=f"constant({value:g})")


def reference_eval(ref: ReferenceSpec, t: float) -> tuple[float, float]:
    """Position and velocity of the reference at ``t``, with the bounds asserted."""
    if t < 0:
        raise ValueError("reference time must be non-negative")
    x = float(ref.x_d(t))
    v = ref.velocity(t)
    if abs(x) > ref.b1:
        raise AssumptionViolation("reference bounds", f"|x_d|={abs(x):.6g} > b1={ref.b1}", t, x)
    if abs(v) > ref.b2 * (1 + 1e-6):
        raise AssumptionViolation("reference bounds", f"|xdot_d|={abs(v):.6g} > b2={ref.b2}", t, v)
    return x, v


def estimate_u_max(bounds: PlantBounds, reference: ReferenceSpec, x_abs_bound: float) -> float:
    """Self-support bound ``(|x'| + a_hi |x| + d_bar) / b_lo`` on the control magnitude.

    ``|x'|`` is bounded by the reference velocity bound and ``|x|`` by ``x_abs_bound``.
    """
    if not bounds.b_lo > 0:
        raise ValueError("b_lo must be positive")
    if x_abs_bound < 0:
        raise ValueError("x_abs_bound must be non-negative")
    return (reference.b2 + bounds.a_hi * x_abs_bound + bounds.d_bar) / bounds.b_lo


# --- measurement channel ----------------------------------------------------

@dataclass(frozen=True)
class MeasurementModel:
    """Measured error ``x~_e = x_e - I^alpha omega`` with ``|omega| <= c1``, ``|I^alpha omega| <= c2``.

    For the integer-order channel pass ``alpha=1``; then ``I^1`` is the plain integral.
    """

    omega: Callable[[float, float], float]
    c1: float
    c2: float
    alpha: float

    def __post_init__(self) -> None:
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1, c2 must be non-negative")
        if not 0 < self.alpha <= 1:
            raise ValueError("measurement alpha must lie in (0, 1]")

    def omega_checked(self, e: float, t: float) -> float:
        w = float(self.omega(e, t))
        if abs(w) > self.c1 * (1 + 1e-12):
            raise AssumptionViolation("measurement bounds", f"|omega|={abs(w):.6g} > c1={self.c1}", t, w)
        return w

    def check_integral(self, value: float, t: float) -> None:
        if abs(value) > self.c2 * (1 + 1e-12):
            raise AssumptionViolation(
                "measurement bounds", f"|I^alpha omega|={abs(value):.6g} > c2={self.c2}", t, value
            )


# --- decoupled robot ----------------------------------------------------------

@dataclass(frozen=True)
class RobotPlant:
    """Rigid robot ``M q'' + d(q, q', t) = u`` with constant inertia matrix.

    ``disturbances[i]`` is called as ``f(q_i, t)``; ``d_bar[i]`` bounds it.
    """

    M: np.ndarray
    disturbances: Sequence[Callable[[float, float], float]]
    d_bar: Sequence[float]

    def __post_init__(self) -> None:
        M = np.atleast_2d(np.asarray(self.M, dtype=float))
        if M.shape[0] != M.shape[1]:
            raise ValueError("inertia matrix must be square")
        if not np.allclose(M, M.T):
            raise ValueError("inertia matrix must be symmetric")
        if np.linalg.eigvalsh(M).min() <= 0:
            raise ValueError("inertia matrix must be positive definite")
        n = M.shape[0]
        if len(self.disturbances) != n or len(self.d_bar) != n:
            raise ValueError("need one disturbance and one bound per joint")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "d_bar", np.asarray(self.d_bar, dtype=float))
        object.__setattr__(self, "_Minv", np.linalg.inv(M))

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def disturbance_checked(self, q: np.ndarray, t: float) -> np.ndarray:
        d = np.array([f(qi, t) for f, qi in zip(self.disturbances, q)])
        bad = np.abs(d) > self.d_bar * (1 + 1e-12)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise AssumptionViolation("plant bounds", f"joint {i}: |d|={abs(d[i]):.6g} > {self.d_bar[i]}", t)
        return d

    def accel(self, q: np.ndarray, u: np.ndarray, t: float) -> np.ndarray:
        return self._Minv @ (u - self.disturbance_checked(q, t))


def robot_step_rk4(
    robot: RobotPlant, q: np.ndarray, qdot: np.ndarray, u: np.ndarray, t: float, h: float
) -> tuple[np.ndarray, np.ndarray]:
    """One RK4 step of the robot with ``u`` held over the step."""

    def f(state, tt):
        qq, vv = state[: robot.n], state[robot.n :]
        return np.concatenate([vv, robot.accel(qq, u, tt)])

    s = np.concatenate([q, qdot])
    k1 = f(s, t)
    k2 = f(s + 0.5 * h * k1, t + 0.5 * h)
    k3 = f(s + 0.5 * h * k2, t + 0.5 * h)
    k4 = f(s + h * k3, t + h)
    s = s + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(s)):
        raise BlowUpError("robot state became non-finite", t + h)
    return s[: robot.n], s[robot.n :]
