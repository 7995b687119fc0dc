"""Predictor-corrector solution of D^a x = -x against the Mittag-Leffler closed form."""

from __future__ import annotations

from fogpss import abm_solve, estimate_convergence_order
from fogpss.reproduce import ml_problem, ml_reference


def main() -> None:
    for alpha in (0.3, 0.5, 0.8, 1.0):
        sol = abm_solve(ml_problem(alpha, N=2000))
        exact = ml_reference(alpha)(sol.t)
        err = abs(sol.states[:, 0] - exact).max()
        print(f"alpha={alpha}: x(1) = {sol.states[-1, 0]:.10f}, exact {exact[-1]:.10f}, max error {err:.2e}")

    print("\nObserved order (max-norm error over [0, 1]):")
    for alpha in (0.3, 0.5, 0.8):
        est = estimate_convergence_order(ml_problem(alpha, N=10), ml_reference(alpha), [250, 500, 1000, 2000])
        print(f"  alpha={alpha}: slope {est.order:.3f}, errors {[f'{e:.2e}' for e in est.errors]}")
    print("Small orders converge slowly in the max norm: the solution behaves like t^alpha near 0.")


if __name__ == "__main__":
    main()
