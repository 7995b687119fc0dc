"""Practical-tracking control laws and their gain calculators.

* :func:`pss_control` -- integer-order self-support law ``u_i = -b_i s_i`` with
  ``s_i = de~_i/dt + rho_i e~_i`` (backward difference for the derivative).
* :func:`fogpss_control` -- fractional law ``u = beta_bar * (D^alpha x~_e + delta x~_e)``
  with the Caputo derivative taken over the whole measured history.
* :func:`lambda_tracker_step` -- adaptive high-gain ``u = -k e`` whose gain is
  driven by a fractional rate law while ``|e| >= lambda``.
* :func:`saturate` -- the three standard saturation shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import BlowUpError, GainConditionError
from .fraccalc import SampledSignal, caputo_at_end, gamma, l1_weights

__all__ = [
    "PssGains",
    "FogpssConfig",
    "LambdaTrackerState",
    "ADAPTATION_LAWS",
    "fogpss_bound_radius",
    "fogpss_min_gain",
    "fogpss_control",
    "FogpssController",
    "pss_bound_radius",
    "pss_derivative_bound",
    "pss_control",
    "lambda_tracker_step",
    "saturate",
]


@dataclass(frozen=True)
class PssGains:
    """Per-joint gains; construction enforces ``b_i > u_max_i / (rho_i * epsilon)``."""

    b: np.ndarray
    rho: np.ndarray
    epsilon: float
    u_max: np.ndarray

    def __post_init__(self) -> None:
        b, rho, u_max = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (self.b, self.rho, self.u_max))
        if not (b.shape == rho.shape == u_max.shape):
            raise ValueError("b, rho and u_max need one entry per joint")
        if np.any(rho <= 0) or not self.epsilon > 0 or np.any(u_max < 0) or np.any(b <= 0):
            raise ValueError("b, rho, epsilon must be positive and u_max non-negative")
        threshold = u_max / (rho * self.epsilon)
        bad = ~(b > threshold)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise GainConditionError(
                f"joint {i}: gain condition b > u_max/(rho*epsilon) fails "
                f"({b[i]:g} <= {threshold[i]:g})"
            )
        for name, v in (("b", b), ("rho", rho), ("u_max", u_max)):
            object.__setattr__(self, name, v)

    @property
    def eta(self) -> np.ndarray:
        """Per-joint decay margin ``rho_i*epsilon - u_max_i/b_i`` (positive by construction)."""
        return self.rho * self.epsilon - self.u_max / self.b


def pss_bound_radius(rho, epsilon: float, c1, c2) -> np.ndarray:
    """Radius ``(rho*c2 + c1)/rho + epsilon`` of the integer-order error ball."""
    rho = np.asarray(rho, dtype=float)
    return (rho * np.asarray(c2) + np.asarray(c1)) / rho + epsilon


def pss_derivative_bound(rho, epsilon: float, c1, c2) -> np.ndarray:
    """Bound ``2*rho*(c2 + c1/rho + epsilon)`` on ``|de/dt|`` inside the error ball."""
    rho = np.asarray(rho, dtype=float)
    return 2.0 * rho * (np.asarray(c2) + np.asarray(c1) / rho + epsilon)


def pss_control(history, h: float, gains: PssGains) -> np.ndarray:
    """Integer-order self-support control for every joint.

    ``history`` holds the measured errors, one row per joint (or a sequence of
    :class:`SampledSignal`), with at least two samples; the newest sample is last.
    """
    if isinstance(history, SampledSignal) or (
        isinstance(history, Sequence) and history and isinstance(history[0], SampledSignal)
    ):
        sigs = [history] if isinstance(history, SampledSignal) else list(history)
        h = sigs[0].h
        history = np.vstack([s.values for s in sigs])
    e = np.atleast_2d(np.asarray(history, dtype=float))
    if e.shape[1] < 2:
        raise ValueError("pss_control needs at least two samples per joint")
    deriv = (e[:, -1] - e[:, -2]) / h
    s = deriv + gains.rho * e[:, -1]
    return -gains.b * s


@dataclass(frozen=True)
class FogpssConfig:
    """Gains of the fractional self-support law.

    Construction enforces ``beta_bar > u_max / (delta * epsilon0)``.
    """

    delta: float
    beta_bar: float
    epsilon0: float
    alpha: float
    u_max: float

    def __post_init__(self) -> None:
        if not (self.delta > 0 and self.epsilon0 > 0 and self.beta_bar > 0 and self.u_max > 0):
            raise ValueError("delta, beta_bar, epsilon0 and u_max must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        threshold = fogpss_min_gain(self.u_max, self.delta, self.epsilon0)
        if not self.beta_bar > threshold:
            raise GainConditionError(
                f"gain condition beta_bar > u_max/(delta*epsilon0) fails: "
                f"{self.beta_bar:g} <= {self.u_max:g}/({self.delta:g}*{self.epsilon0:g}) = {threshold:.6g}"
            )

    @property
    def min_gain(self) -> float:
        return fogpss_min_gain(self.u_max, self.delta, self.epsilon0)

    @property
    def beta_hat(self) -> float:
        """Descent rate ``(beta_bar*delta*epsilon0 - u_max)/beta_bar`` outside the ball."""
        return (self.beta_bar * self.delta * self.epsilon0 - self.u_max) / self.beta_bar

    def bound_radius(self, c1: float, c2: float) -> float:
        return fogpss_bound_radius(self.delta, self.epsilon0, c1, c2)


def fogpss_bound_radius(delta: float, epsilon0: float, c1: float, c2: float) -> float:
    """Radius ``(delta*c2 + c1)/delta + epsilon0`` of the ball the true error is driven into."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if c1 < 0 or c2 < 0 or epsilon0 < 0:
        raise ValueError("c1, c2 and epsilon0 must be non-negative")
    return (delta * c2 + c1) / delta + epsilon0


def fogpss_min_gain(u_max: float, delta: float, epsilon0: float) -> float:
    """Lower bound ``u_max/(delta*epsilon0)``; ``beta_bar`` must exceed it strictly."""
    if u_max < 0:
        raise ValueError("u_max must be non-negative")
    if not (delta > 0 and epsilon0 > 0):
        raise ValueError("delta and epsilon0 must be positive")
    return u_max / (delta * epsilon0)


def fogpss_control(history_xe_tilde: SampledSignal, cfg: FogpssConfig, negate_u: bool = False) -> float:
    """Control value at the newest sample of the measured-error history."""
    if history_xe_tilde is None or len(history_xe_tilde) == 0:
        raise ValueError("empty history")
    v = history_xe_tilde.values
    d = caputo_at_end(v, history_xe_tilde.h, cfg.alpha)
    u = cfg.beta_bar * (d + cfg.delta * v[-1])
    return -u if negate_u else u


class FogpssController:
    """Incremental form of :func:`fogpss_control` for a fixed-step loop.

    The newest L1 term is split off so a caller can write the control as an
    affine function ``u = offset + slope * x~_e(t_{n+1})`` of the not yet known
    next measurement.
    """

    def __init__(self, cfg: FogpssConfig, h: float, n_max: int, negate_u: bool = False):
        self.cfg = cfg
        self.h = h
        self.sign = -1.0 if negate_u else 1.0
        self._w = l1_weights(n_max + 1, cfg.alpha)
        self._c = h ** (-cfg.alpha) / gamma(2.0 - cfg.alpha)

    def affine(self, history: np.ndarray) -> tuple[float, float]:
        """``(offset, slope)`` of the control at the next sample given ``history`` so far."""
        n = len(history)
        if n == 0:
            return 0.0, self.sign * self.cfg.beta_bar * self.cfg.delta
        # D(t_n) = c * [w0*(y - y_{n-1}) + sum_{j>=1} w_j (y_{n-j} - y_{n-j-1})]
        diffs = np.diff(history)[::-1]
        tail = float(np.dot(self._w[1:n], diffs)) if n > 1 else 0.0
        offset = self._c * (tail - history[-1])
        slope = self._c + self.cfg.delta
        b = self.sign * self.cfg.beta_bar
        return b * offset, b * slope


ADAPTATION_LAWS: dict[str, Callable[[float, float], float]] = {
    "default": lambda e, lam: (e - lam) * e,
    "quadratic": lambda e, lam: e * e,
    "linear": lambda e, lam: e - lam,
}


@dataclass(frozen=True)
class LambdaTrackerState:
    """Gain state of the adaptive lambda-tracker.

    ``rates`` is the history of the piecewise-constant gain rate and
    ``integral`` the fractional integral of that history at the current step.
    """

    k: float
    lam: float
    alpha: float
    law: str = "default"
    rates: tuple = field(default=(), repr=False)
    integral: float = 0.0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.law not in ADAPTATION_LAWS:
            raise KeyError(f"unknown adaptation law {self.law!r}; known: {sorted(ADAPTATION_LAWS)}")


def lambda_tracker_step(state: LambdaTrackerState, e, h: float) -> tuple[LambdaTrackerState, np.ndarray]:
    """Advance the gain one step and return ``(new_state, u = -k e)``.

    The gain follows the fractional integral of its rate history (rectangle
    product rule, exact for piecewise-constant rates). Increments are only
    applied while ``|e| >= lambda`` and never negative, so the gain is frozen
    inside the lambda-ball and non-decreasing overall.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    e = np.atleast_1d(np.asarray(e, dtype=float))
    norm = float(np.linalg.norm(e))
    active = norm >= state.lam
    rate = ADAPTATION_LAWS[state.law](norm, state.lam) if active else 0.0
    rates = state.rates + (rate,)
    n = len(rates)
    a = state.alpha
    lags = np.arange(n, 0, -1, dtype=float)  # lag n - j for j = 0..n-1
    weights = h**a / a * (lags**a - (lags - 1) ** a) / gamma(a)
    integral = float(np.dot(weights, rates))
    k = state.k
    if active:
        k = k + max(0.0, integral - state.integral)
    if not math.isfinite(k):
        raise BlowUpError("adaptive gain became non-finite")
    new = replace(state, k=k, rates=rates, integral=integral)
    return new, -k * e


def saturate(value: float, epsilon: float, kind: str = "tanh") -> float:
    """Saturation with level ``epsilon``: ``tanh``, ``atan`` or hard ``clip``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if kind == "tanh":
        return epsilon * math.tanh(value)
    if kind == "atan":
        return 2.0 * epsilon / math.pi * math.atan(value)
    if kind == "clip":
        return max(-epsilon, min(epsilon, value))
    raise ValueError(f"unknown saturation kind {kind!r}")
