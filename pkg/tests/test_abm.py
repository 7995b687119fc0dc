from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from fogpss.abm import (
    FdeProblem,
    abm_coeff_a,
    abm_coeff_b,
    abm_solve,
    estimate_convergence_order,
)
from fogpss.errors import BlowUpError
from fogpss.fraccalc import SampledSignal, caputo_derivative, mittag_leffler


def decay(alpha, N, T=1.0, x0=1.0):
    return FdeProblem(alpha, lambda t, x: -x, [x0], T, N)


def ml_ref(alpha):
    return lambda t: mittag_leffler(alpha, -np.asarray(t) ** alpha)


# --- coefficients ----------------------------------------------------------------


@pytest.mark.parametrize("n", [0, 1, 5, 40])
@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.6])
def test_coeff_a_last_is_one(n, alpha):
    assert abm_coeff_a(n + 1, n, alpha) == 1.0


def test_coeff_a_values():
    assert abm_coeff_a(1, 1, 1.0) == pytest.approx(2.0)
    assert abm_coeff_a(0, 0, 0.5) == pytest.approx(0.5)
    # trapezoidal rule at alpha = 1: interior weights 2, first weight 1
    for n in range(1, 6):
        assert abm_coeff_a(0, n, 1.0) == pytest.approx(1.0)
        for j in range(1, n + 1):
            assert abm_coeff_a(j, n, 1.0) == pytest.approx(2.0)


def test_coeff_b_values():
    assert abm_coeff_b(3, 3, 1.0, 0.1) == pytest.approx(0.1)
    assert abm_coeff_b(0, 0, 0.5, 1.0) == pytest.approx(2.0)
    assert abm_coeff_b(0, 1, 0.5, 1.0) == pytest.approx(0.8284271247461901, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
def test_coefficients_integrate_constants_exactly(alpha):
    # both rules reproduce I^alpha 1 = t^alpha / Gamma(alpha+1) at t_{n+1} = (n+1) h
    h, n = 0.1, 12
    t = (n + 1) * h
    exact = t**alpha / math.gamma(alpha + 1)
    pred = sum(abm_coeff_b(j, n, alpha, h) for j in range(n + 1)) / math.gamma(alpha)
    corr = h**alpha / math.gamma(alpha + 2) * sum(abm_coeff_a(j, n, alpha) for j in range(n + 2))
    assert pred == pytest.approx(exact, rel=1e-12)
    assert corr == pytest.approx(exact, rel=1e-12)


def test_coefficient_ranges():
    with pytest.raises(IndexError):
        abm_coeff_a(5, 3, 0.5)
    with pytest.raises(IndexError):
        abm_coeff_b(4, 3, 0.5, 0.1)
    with pytest.raises(IndexError):
        abm_coeff_b(-1, 3, 0.5, 0.1)


# --- problems ---------------------------------------------------------------------


def test_problem_validation():
    with pytest.raises(ValueError):
        FdeProblem(0.5, lambda t, x: x, [1.0, 0.0], 1.0, 10)
    with pytest.raises(ValueError):
        FdeProblem(2.5, lambda t, x: x, [1.0, 0.0, 0.0], 1.0, 10)
    with pytest.raises(ValueError):
        FdeProblem(0.5, lambda t, x: x, [1.0], 0.0, 10)
    with pytest.raises(ValueError):
        FdeProblem(0.5, lambda t, x: x, [1.0], 1.0, 0)


def test_grid_metadata():
    sol = abm_solve(decay(0.6, 37, T=2.0))
    assert sol.h == 2.0 / 37
    np.testing.assert_array_equal(sol.t, np.arange(38) * (2.0 / 37))
    assert sol.states.shape == (38, 1)


# --- solutions --------------------------------------------------------------------


def test_integer_order_decay():
    sol = abm_solve(decay(1.0, 1000))
    assert sol.states[-1, 0] == pytest.approx(math.exp(-1), abs=2e-4)
    assert np.abs(sol.states[:, 0] - np.exp(-sol.t)).max() <= 2e-4


def test_zero_rhs_keeps_initial_value():
    sol = abm_solve(FdeProblem(0.5, lambda t, x: np.zeros_like(x), [3.0], 2.0, 50))
    assert np.all(sol.states == 3.0)


def test_half_order_decay_against_mittag_leffler():
    sol = abm_solve(decay(0.5, 2000))
    assert sol.states[-1, 0] == pytest.approx(0.427583576155807, abs=1e-3)
    assert np.abs(sol.states[:, 0] - ml_ref(0.5)(sol.t)).max() <= 1e-3


def test_second_order_range_uses_both_initial_values():
    # D^1.5 x = 0 with x(0)=1, x'(0)=2 gives x = 1 + 2t
    sol = abm_solve(FdeProblem(1.5, lambda t, x: np.zeros_like(x), [1.0, 2.0], 1.0, 20))
    np.testing.assert_allclose(sol.states[:, 0], 1 + 2 * sol.t, atol=1e-13)


def test_vector_state_decouples():
    A = np.diag([-1.0, -2.0])
    sol = abm_solve(FdeProblem(0.7, lambda t, x: A @ x, [[1.0, 0.5]], 1.0, 400))
    s1 = abm_solve(FdeProblem(0.7, lambda t, x: -x, [1.0], 1.0, 400))
    s2 = abm_solve(FdeProblem(0.7, lambda t, x: -2 * x, [0.5], 1.0, 400))
    np.testing.assert_allclose(sol.states[:, 0], s1.states[:, 0], rtol=1e-13)
    np.testing.assert_allclose(sol.states[:, 1], s2.states[:, 0], rtol=1e-13)


def test_integer_reduction_matches_rk4_reference():
    sol = abm_solve(decay(1.0, 5000, T=5.0))
    ref = solve_ivp(lambda t, x: -x, (0, 5), [1.0], method="RK45", t_eval=sol.t, rtol=1e-11, atol=1e-13)
    assert np.abs(sol.states[:, 0] - ref.y[0]).max() <= 5e-3


def test_determinism():
    a = abm_solve(decay(0.4, 300), keep_predictor=True)
    b = abm_solve(decay(0.4, 300), keep_predictor=True)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.predictor_states, b.predictor_states)


def test_blow_up_reports_step():
    with pytest.raises(BlowUpError) as info, np.errstate(over="ignore", invalid="ignore"):
        abm_solve(FdeProblem(0.9, lambda t, x: x**3, [10.0], 5.0, 500))
    assert info.value.step is not None and info.value.step >= 1


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_solution_is_consistent_with_caputo_operator(alpha):
    # L1 derivative of the computed trajectory approaches the right-hand side away from t = 0
    errs = []
    for N in (200, 400, 800):
        sol = abm_solve(FdeProblem(alpha, lambda t, x: np.cos(t) - x, [0.0], 1.0, N))
        d = caputo_derivative(SampledSignal(0.0, sol.h, sol.states[:, 0]), alpha).values
        rhs = np.cos(sol.t) - sol.states[:, 0]
        late = sol.t >= 0.5
        errs.append(np.abs(d[late] - rhs[late]).max())
    assert errs[0] > errs[1] > errs[2]


# --- convergence order ---------------------------------------------------------


def test_order_integer_case():
    est = estimate_convergence_order(decay(1.0, 10), lambda t: np.exp(-t), [100, 200, 400, 800])
    assert est.order == pytest.approx(2.0, abs=0.3)
    assert float(est) == est.order


@pytest.mark.parametrize("alpha", [0.5, 0.8])
def test_endpoint_order_matches_smooth_rate(alpha):
    est = estimate_convergence_order(decay(alpha, 10), ml_ref(alpha), [250, 500, 1000, 2000], norm="final")
    assert est.order == pytest.approx(min(2.0, 1.0 + alpha), abs=0.3)


def test_order_degenerate_when_exact():
    est = estimate_convergence_order(
        FdeProblem(0.5, lambda t, x: np.zeros_like(x), [1.0], 1.0, 10), lambda t: np.ones_like(t), [10, 20, 40]
    )
    assert est.degenerate and math.isinf(est.order)


def test_order_input_validation():
    with pytest.raises(ValueError):
        estimate_convergence_order(decay(0.5, 10), ml_ref(0.5), [100, 200])
    with pytest.raises(ValueError):
        estimate_convergence_order(decay(0.5, 10), ml_ref(0.5), [100, 200, 400], norm="l2")
