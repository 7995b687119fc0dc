"""Fractional Adams-Bashforth-Moulton predictor-corrector solver.

Solves the Caputo initial value problem ``D^alpha x = f(t, x)`` on ``[0, T]``
with ``x^(k)(0) = x0[k]`` for ``k < ceil(alpha)``, through its Volterra form,
using the product-trapezoidal corrector and product-rectangle predictor
(Diethelm-Ford-Freed). Exactly one corrector evaluation is made per step and
the full history is kept, so a solve costs ``O(N**2)``.

The first corrector weight is ``n**(alpha+1) - (n-alpha)*(n+1)**alpha``;
with it the global error behaves like ``h**min(2, 1+alpha)`` for problems
whose right-hand side is smooth in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BlowUpError
from .fraccalc import gamma

__all__ = [
    "FdeProblem",
    "FdeSolution",
    "ConvergenceEstimate",
    "abm_coeff_a",
    "abm_coeff_b",
    "abm_solve",
    "estimate_convergence_order",
]


@dataclass(frozen=True)
class FdeProblem:
    alpha: float
    rhs: Callable[[float, np.ndarray], np.ndarray]
    x0: Sequence
    T: float
    N: int

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 2:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if len(self.x0) != math.ceil(self.alpha):
            raise ValueError(
                f"need ceil(alpha)={math.ceil(self.alpha)} initial values, got {len(self.x0)}"
            )
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")

    @property
    def h(self) -> float:
        return self.T / self.N


@dataclass(frozen=True)
class FdeSolution:
    h: float
    t: np.ndarray
    states: np.ndarray
    predictor_states: np.ndarray | None = None

    @property
    def t0(self) -> float:
        return 0.0


def abm_coeff_a(j: int, n: int, alpha: float) -> float:
    """Corrector weight ``a_{j,n+1}`` (without the ``h**alpha/Gamma(alpha+2)`` factor)."""
    if not 0 <= j <= n + 1:
        raise IndexError(f"j={j} outside 0..{n + 1}")
    if j == n + 1:
        return 1.0
    if j == 0:
        return n ** (alpha + 1) - (n - alpha) * (n + 1) ** alpha
    m = n - j
    return (m + 2) ** (alpha + 1) + m ** (alpha + 1) - 2.0 * (m + 1) ** (alpha + 1)


def abm_coeff_b(j: int, n: int, alpha: float, h: float) -> float:
    """Predictor weight ``b_{j,n+1} = h**alpha/alpha * ((n-j+1)**alpha - (n-j)**alpha)``."""
    if not 0 <= j <= n:
        raise IndexError(f"j={j} outside 0..{n}")
    if not h > 0:
        raise ValueError("h must be positive")
    return h**alpha / alpha * ((n - j + 1) ** alpha - (n - j) ** alpha)


def abm_solve(problem: FdeProblem, keep_predictor: bool = False) -> FdeSolution:
    """Integrate ``problem`` with the fractional ABM scheme in PECE mode."""
    alpha, N, h = problem.alpha, int(problem.N), problem.h
    x0 = np.atleast_2d(np.asarray(problem.x0, dtype=float))
    if x0.shape[0] != math.ceil(alpha):
        x0 = x0.T
    dim = x0.shape[1]
    t = h * np.arange(N + 1)

    # lag-indexed weights: lag m = n - j
    m = np.arange(N + 1, dtype=float)
    b_lag = h**alpha / alpha * ((m + 1) ** alpha - m**alpha)
    a_lag = (m + 2) ** (alpha + 1) + m ** (alpha + 1) - 2.0 * (m + 1) ** (alpha + 1)
    c_pred = 1.0 / gamma(alpha)
    c_corr = h**alpha / gamma(alpha + 2.0)

    def taylor(tn: float) -> np.ndarray:
        return sum(tn**k / math.factorial(k) * x0[k] for k in range(x0.shape[0]))

    x = np.empty((N + 1, dim))
    f = np.empty((N + 1, dim))
    xp = np.empty((N + 1, dim)) if keep_predictor else None
    x[0] = x0[0]
    f[0] = problem.rhs(0.0, x[0].copy())
    if keep_predictor:
        xp[0] = x0[0]

    for n in range(N):
        base = taylor(t[n + 1])
        pred = base + c_pred * (b_lag[n::-1] @ f[: n + 1])
        f_pred = np.asarray(problem.rhs(t[n + 1], pred), dtype=float)
        a0 = n ** (alpha + 1) - (n - alpha) * (n + 1) ** alpha
        hist = a0 * f[0] + a_lag[n - 1 :: -1][:n] @ f[1 : n + 1] if n else a0 * f[0]
        x[n + 1] = base + c_corr * (f_pred + hist)
        if not np.all(np.isfinite(x[n + 1])):
            raise BlowUpError("non-finite solver state", t=float(t[n + 1]), step=n + 1)
        f[n + 1] = problem.rhs(t[n + 1], x[n + 1].copy())
        if keep_predictor:
            xp[n + 1] = pred

    return FdeSolution(h=h, t=t, states=x, predictor_states=xp)


@dataclass(frozen=True)
class ConvergenceEstimate:
    order: float
    errors: np.ndarray
    steps: np.ndarray
    degenerate: bool = False

    def __float__(self) -> float:
        return self.order


def estimate_convergence_order(
    problem: FdeProblem,
    reference: Callable[[np.ndarray], np.ndarray],
    Ns: Sequence[int],
    norm: str = "max",
) -> ConvergenceEstimate:
    """Least-squares slope of ``log(error)`` against ``log(h)`` over the step counts ``Ns``.

    ``norm="max"`` uses the maximum error over all grid points; ``norm="final"``
    uses the error at ``T`` only. Exact (zero) errors give an infinite order
    flagged as ``degenerate``.
    """
    Ns = np.asarray(Ns, dtype=int)
    if Ns.size < 3 or np.any(np.diff(Ns) <= 0):
        raise ValueError("Ns must be strictly increasing with at least three entries")
    if norm not in ("max", "final"):
        raise ValueError(f"unknown norm {norm!r}")
    errors = []
    for N in Ns:
        sol = abm_solve(FdeProblem(problem.alpha, problem.rhs, problem.x0, problem.T, int(N)))
        exact = np.asarray(reference(sol.t), dtype=float).reshape(sol.states.shape)
        err = np.abs(sol.states - exact).max(axis=1)
        errors.append(err.max() if norm == "max" else err[-1])
    errors = np.array(errors)
    if np.any(errors == 0):
        return ConvergenceEstimate(math.inf, errors, Ns, degenerate=True)
    hs = problem.T / Ns
    slope = np.polyfit(np.log(hs), np.log(errors), 1)[0]
    return ConvergenceEstimate(float(slope), errors, Ns)
