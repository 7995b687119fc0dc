"""Stability checks for fractional-order systems.

``check_linear_fo_stability`` applies the eigenvalue-argument test for the
commensurate linear system ``D^alpha x = A x``: the origin is stable when every
eigenvalue satisfies ``|arg(lambda)| > alpha*pi/2``. The boundary itself is
classified unstable.

``audit_fractional_square_inequality`` checks numerically that
``0.5 * D^alpha (x**2) <= x * D^alpha x`` on a sampled trajectory. The
inequality is exact in the continuum; the audit measures how faithfully the
L1 discretization preserves it, so it is a regression tool and not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fraccalc import SampledSignal, caputo_derivative, power_rule_caputo

__all__ = [
    "LinearFoSystem",
    "StabilityVerdict",
    "SquareInequalityReport",
    "check_linear_fo_stability",
    "hurwitz_stable",
    "audit_fractional_square_inequality",
]

# margins this close to zero are treated as lying on the boundary
_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class LinearFoSystem:
    A: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A contains non-finite entries")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        object.__setattr__(self, "A", A)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    margin: float
    eigenvalues: np.ndarray
    eigen_args: np.ndarray

    def __str__(self) -> str:
        args = ", ".join(f"{a:.6f}" for a in self.eigen_args)
        return (
            f"{'stable' if self.stable else 'unstable'} "
            f"(margin {self.margin:+.6f} rad; |arg| = [{args}])"
        )


def check_linear_fo_stability(system: LinearFoSystem) -> StabilityVerdict:
    try:
        eig = np.linalg.eigvals(system.A)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise np.linalg.LinAlgError("eigenvalue computation returned non-finite values")
    # np.angle(0) == 0, so a zero eigenvalue is unstable with margin -alpha*pi/2
    args = np.abs(np.angle(eig))
    margin = float(args.min() - system.alpha * math.pi / 2)
    if abs(margin) < _BOUNDARY_TOL:
        margin = 0.0
    return StabilityVerdict(stable=margin > 0, margin=margin, eigenvalues=eig, eigen_args=args)


def hurwitz_stable(A: np.ndarray) -> bool:
    """Classical test: every eigenvalue of ``A`` has negative real part."""
    return bool(np.all(np.linalg.eigvals(np.asarray(A, dtype=float)).real < 0))


@dataclass(frozen=True)
class SquareInequalityReport:
    max_violation: float
    tolerance: float
    passed: bool
    lhs: np.ndarray
    rhs: np.ndarray


def _l1_error_constant(n: int, h: float, alpha: float) -> float:
    # observed L1 error constant for t**2 on the audited grid: err / (h**(2-a) * |f''|)
    probe = SampledSignal.from_function(lambda t: t**2, n * h, h)
    err = np.abs(caputo_derivative(probe, alpha).values - power_rule_caputo(probe.times, 2, alpha))
    return float(err.max() / (2.0 * h ** (2.0 - alpha)))


def audit_fractional_square_inequality(
    signal: SampledSignal, alpha: float, c_tol: float = 10.0
) -> SquareInequalityReport:
    """Check ``0.5*D^alpha(x^2) <= x*D^alpha(x)`` on the grid of ``signal``.

    The tolerance is ``c_tol * C * h**(2-alpha) * R`` where ``C`` is the L1
    error constant observed on ``t**2`` over the same grid and ``R`` estimates
    the curvature of both sides from second differences.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    x = signal.values
    h = signal.h
    sq = signal.with_values(x**2)
    lhs = 0.5 * caputo_derivative(sq, alpha).values
    rhs = x * caputo_derivative(signal, alpha).values
    violation = float(np.max(lhs - rhs))

    if x.size >= 3:
        curv_sq = np.abs(np.diff(x**2, 2)).max() / h**2
        curv_x = np.abs(np.diff(x, 2)).max() / h**2
        roughness = 0.5 * curv_sq + np.abs(x).max() * curv_x
    else:
        roughness = 0.0
    const = _l1_error_constant(x.size - 1, h, alpha)
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1.0)
    tolerance = c_tol * const * h ** (2.0 - alpha) * roughness + 64 * np.finfo(float).eps * scale
    return SquareInequalityReport(
        max_violation=violation,
        tolerance=float(tolerance),
        passed=violation <= tolerance,
        lhs=lhs,
        rhs=rhs,
    )
