"""Fractional calculus on uniformly sampled signals.

All operators use the lower terminal ``t0`` of the signal and are defined
to be zero at ``t0`` itself, where the defining integrals are empty.

* :func:`rl_integral` -- Riemann-Liouville integral by product-rectangle
  quadrature, first order in ``h``.
* :func:`caputo_derivative` -- Caputo derivative for ``0 < alpha < 1`` by the
  L1 scheme, order ``2 - alpha`` in ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np

__all__ = [
    "SampledSignal",
    "gamma",
    "rl_integral",
    "caputo_derivative",
    "caputo_at_end",
    "rl_weights",
    "l1_weights",
    "mittag_leffler",
    "power_rule_integral",
    "power_rule_caputo",
]

# Lanczos approximation, g = 7 with 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
# Largest argument with a finite double-precision gamma value.
GAMMA_MAX_ARG = 171.6243769563027


@dataclass(frozen=True)
class SampledSignal:
    """A scalar signal on the uniform grid ``t0 + k*h``."""

    t0: float
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).ravel()
        if not self.h > 0:
            raise ValueError(f"step must be positive, got h={self.h}")
        if values.size == 0:
            raise ValueError("signal must contain at least one sample")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal contains non-finite samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(
        cls, f: Callable[[np.ndarray], np.ndarray], t_end: float, h: float, t0: float = 0.0
    ) -> SampledSignal:
        """Sample ``f`` on ``[t0, t_end]``; ``t_end - t0`` should be a multiple of ``h``."""
        n = int(round((t_end - t0) / h))
        t = t0 + h * np.arange(n + 1)
        return cls(t0, h, np.broadcast_to(f(t), t.shape))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.values.size)

    def __len__(self) -> int:
        return self.values.size

    def with_values(self, values: np.ndarray) -> SampledSignal:
        return SampledSignal(self.t0, self.h, values)


def _check_alpha(alpha: float, upper: float | None = None) -> float:
    alpha = float(alpha)
    if not alpha > 0 or not math.isfinite(alpha):
        raise ValueError(f"fractional order must be positive, got {alpha}")
    if upper is not None and not alpha < upper:
        raise ValueError(f"fractional order must lie in (0, {upper}), got {alpha}")
    return alpha


def gamma(s: float) -> float:
    """Euler gamma function via the Lanczos approximation.

    Negative non-integer arguments are handled through the reflection formula.
    Poles (``s = 0, -1, -2, ...``) raise :class:`ValueError` and arguments whose
    value exceeds the double range raise :class:`OverflowError`.
    """
    s = float(s)
    if math.isnan(s):
        raise ValueError("gamma of NaN")
    if s <= 0 and s == math.floor(s):
        raise ValueError(f"gamma has a pole at s={s:g}")
    if s > GAMMA_MAX_ARG:
        raise OverflowError(f"gamma({s:g}) exceeds the double-precision range")
    if s < 0.5:
        return math.pi / (math.sin(math.pi * s) * gamma(1.0 - s))

    z = s - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so that t**(z + 0.5) does not overflow before exp(-t) scales it
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * math.exp(-t) * half * acc


def rl_weights(n: int, alpha: float, h: float) -> np.ndarray:
    """Quadrature weights by lag ``m = 1..n`` for :func:`rl_integral`.

    ``w[m-1] = h**alpha * (m**alpha - (m-1)**alpha) / Gamma(alpha+1)`` is the
    exact integral of the kernel over the cell ending ``m`` steps before the
    evaluation point.
    """
    m = np.arange(n + 1, dtype=float)
    return h**alpha * np.diff(m**alpha) / gamma(alpha + 1.0)


def l1_weights(n: int, alpha: float) -> np.ndarray:
    """L1 weights ``w_j = (j+1)**(1-alpha) - j**(1-alpha)`` for ``j = 0..n-1``."""
    j = np.arange(n + 1, dtype=float)
    return np.diff(j ** (1.0 - alpha))


def rl_integral(signal: SampledSignal, alpha: float) -> SampledSignal:
    """Riemann-Liouville fractional integral of order ``alpha > 0``.

    The signal is treated as piecewise constant (left endpoint) and the kernel
    ``(t - tau)**(alpha - 1) / Gamma(alpha)`` is integrated exactly on each cell.
    Constants are therefore integrated exactly.
    """
    alpha = _check_alpha(alpha)
    f = signal.values
    n = f.size
    out = np.zeros(n)
    if n > 1:
        w = rl_weights(n - 1, alpha, signal.h)
        out[1:] = np.convolve(f[:-1], w)[: n - 1]
    return signal.with_values(out)


def caputo_derivative(signal: SampledSignal, alpha: float) -> SampledSignal:
    r"""Caputo derivative of order ``0 < alpha < 1`` by the L1 scheme.

    .. math::

        D^\alpha f(t_n) \approx \frac{h^{-\alpha}}{\Gamma(2-\alpha)}
            \sum_{j=0}^{n-1} w_j (f_{n-j} - f_{n-j-1})

    The scheme is exact for piecewise-linear signals.
    """
    alpha = _check_alpha(alpha, upper=1.0)
    f = signal.values
    n = f.size
    if n < 2:
        raise ValueError("caputo_derivative needs at least two samples")
    scale = signal.h ** (-alpha) / gamma(2.0 - alpha)
    out = np.zeros(n)
    out[1:] = scale * np.convolve(np.diff(f), l1_weights(n - 1, alpha))[: n - 1]
    return signal.with_values(out)


def caputo_at_end(values: np.ndarray, h: float, alpha: float, weights: np.ndarray | None = None) -> float:
    """L1 Caputo derivative at the last sample only (O(n) instead of O(n^2)).

    ``weights`` may be a precomputed :func:`l1_weights` array of at least
    ``len(values) - 1`` entries.
    """
    values = np.asarray(values, dtype=float)
    n = values.size - 1
    if n < 1:
        return 0.0
    if weights is None:
        weights = l1_weights(n, alpha)
    diffs = np.diff(values)[::-1]
    return float(h ** (-alpha) / gamma(2.0 - alpha) * np.dot(weights[:n], diffs))


def _ml_scalar(alpha: float, z: float, tol: float) -> float:
    if z == 0.0:
        return 1.0
    if abs(z) <= 1.0:
        # terms never exceed 1/min(Gamma) ~ 1.13, so plain double summation is safe
        total, k = 0.0, 0
        while True:
            arg = alpha * k + 1.0
            if arg > GAMMA_MAX_ARG:
                break
            term = z**k / gamma(arg)
            total += term
            if k > 0 and abs(term) < tol:
                break
            k += 1
        return total

    # the alternating series cancels badly for z < -1; size the working
    # precision from the largest term
    log_terms = []
    k = 0
    while True:
        lt = k * math.log(abs(z)) - math.lgamma(alpha * k + 1.0)
        log_terms.append(lt)
        if k > 0 and lt < math.log(tol):
            break
        k += 1
    digits = max(log_terms) / math.log(10.0)
    with mpmath.workdps(int(digits) + 25):
        zz = mpmath.mpf(z)
        a = mpmath.mpf(alpha)
        total = mpmath.mpf(0)
        for j in range(k + 1):
            total += zz**j / mpmath.gamma(a * j + 1)
        return float(total)


def mittag_leffler(alpha: float, z, tol: float = 1e-14):
    """One-parameter Mittag-Leffler function ``E_alpha(z)`` by its power series.

    Only the series-safe region ``|z| <= 5`` is supported. Summation stops once
    a term drops below ``tol`` in absolute value. ``z`` may be an array.
    """
    alpha = _check_alpha(alpha)
    z_arr = np.asarray(z, dtype=float)
    if np.any(np.abs(z_arr) > 5.0):
        raise ValueError("mittag_leffler is restricted to |z| <= 5")
    if z_arr.ndim == 0:
        return _ml_scalar(alpha, float(z_arr), tol)
    out = np.array([_ml_scalar(alpha, float(v), tol) for v in z_arr.ravel()])
    return out.reshape(z_arr.shape)


def power_rule_integral(t, p: float, alpha: float) -> np.ndarray:
    """Closed form ``I^alpha t**p = Gamma(p+1)/Gamma(p+1+alpha) * t**(p+alpha)``."""
    t = np.asarray(t, dtype=float)
    return gamma(p + 1.0) / gamma(p + 1.0 + alpha) * t ** (p + alpha)


def power_rule_caputo(t, p: float, alpha: float) -> np.ndarray:
    """Closed form Caputo derivative of ``t**p`` (zero for ``p = 0``)."""
    t = np.asarray(t, dtype=float)
    if p == 0:
        return np.zeros_like(t)
    with np.errstate(divide="ignore"):
        out = gamma(p + 1.0) / gamma(p + 1.0 - alpha) * t ** (p - alpha)
    return np.where(t > 0, out, 0.0)
