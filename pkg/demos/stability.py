"""Eigenvalue-argument stability test for D^a x = A x, checked against simulation."""

from __future__ import annotations

import numpy as np

from fogpss import FdeProblem, LinearFoSystem, abm_solve, check_linear_fo_stability

# eigenvalues +-i sit at |arg| = pi/2: stable for any order below 1, not for order 1
ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])


def main() -> None:
    for alpha in (0.5, 0.9, 1.0):
        verdict = check_linear_fo_stability(LinearFoSystem(ROTATION, alpha))
        print(f"alpha={alpha}: {verdict}")

    # eigenvalues 0.2 +- i: |arg| ~ 1.37 rad, stable only when alpha < 0.87
    A = np.array([[0.2, 1.0], [-1.0, 0.2]])
    for alpha in (0.6, 0.95):
        verdict = check_linear_fo_stability(LinearFoSystem(A, alpha))
        with np.errstate(all="ignore"):
            sol = abm_solve(FdeProblem(alpha, lambda t, x: A @ x, [np.array([1.0, 0.0])], 40.0, 4000))
        norms = np.linalg.norm(sol.states, axis=1)
        print(f"alpha={alpha}: {verdict}; |x(20)| = {norms[2000]:.3g}, |x(40)| = {norms[-1]:.3g}")


if __name__ == "__main__":
    main()
