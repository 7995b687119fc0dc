"""Fractional operators on sampled signals: Caputo derivative, RL integral, gamma and Mittag-Leffler."""

from __future__ import annotations

import numpy as np

from fogpss import (
    SampledSignal,
    caputo_derivative,
    gamma,
    mittag_leffler,
    power_rule_caputo,
    power_rule_integral,
    rl_integral,
)


def main() -> None:
    print(f"gamma(0.5) = {gamma(0.5):.15f}  (sqrt(pi) = {np.sqrt(np.pi):.15f})")
    for a in (0.3, 0.5, 0.8):
        print(f"E_{a}(-1) = {mittag_leffler(a, -1.0):.15f}")

    print("\nL1 Caputo derivative of t^2 on [0, 1], max error by step:")
    for a in (0.3, 0.7):
        for h in (1e-2, 5e-3, 2.5e-3):
            s = SampledSignal.from_function(lambda t: t**2, 1.0, h)
            err = np.abs(caputo_derivative(s, a).values - power_rule_caputo(s.times, 2, a)).max()
            print(f"  alpha={a} h={h:<7g} error={err:.3e}")

    print("\nRL integral of t on [0, 1]:")
    for h in (1e-2, 5e-3, 2.5e-3):
        s = SampledSignal.from_function(lambda t: t, 1.0, h)
        err = np.abs(rl_integral(s, 0.5).values - power_rule_integral(s.times, 1, 0.5)).max()
        print(f"  alpha=0.5 h={h:<7g} error={err:.3e}")


if __name__ == "__main__":
    main()
