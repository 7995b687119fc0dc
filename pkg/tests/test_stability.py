from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fogpss.abm import FdeProblem, abm_solve
from fogpss.fraccalc import SampledSignal
from fogpss.stability import (
    LinearFoSystem,
    audit_fractional_square_inequality,
    check_linear_fo_stability,
    hurwitz_stable,
)


def verdict(A, alpha):
    return check_linear_fo_stability(LinearFoSystem(np.array(A, dtype=float), alpha))


def test_scalar_cases():
    v = verdict([[-1.0]], 0.5)
    assert v.stable and v.margin == pytest.approx(0.75 * math.pi)
    assert not verdict([[1.0]], 0.5).stable


def test_rotation_generator():
    A = [[0.0, 1.0], [-1.0, 0.0]]
    v = verdict(A, 0.5)
    assert v.stable and v.margin == pytest.approx(math.pi / 4)
    np.testing.assert_allclose(v.eigen_args, [math.pi / 2, math.pi / 2])
    edge = verdict(A, 1.0)
    assert edge.margin == 0.0 and not edge.stable


def test_zero_eigenvalue_is_unstable():
    assert not verdict([[0.0, 1.0], [0.0, -1.0]], 0.7).stable


def test_system_validation():
    with pytest.raises(ValueError):
        LinearFoSystem(np.ones((2, 3)), 0.5)
    with pytest.raises(ValueError):
        LinearFoSystem(np.eye(2), 1.2)
    with pytest.raises(ValueError):
        LinearFoSystem(np.array([[math.inf]]), 0.5)


def test_verdict_text():
    assert str(verdict([[-1.0]], 0.5)).startswith("stable")


def _separated_matrix(rng, n):
    while True:
        A = rng.normal(size=(n, n)) * 2
        if np.abs(np.linalg.eigvals(A).real).min() > 0.05:
            return A


def test_integer_order_agrees_with_hurwitz():
    rng = np.random.default_rng(11)
    for k in range(100):
        A = _separated_matrix(rng, 2 + k % 2)
        assert verdict(A, 1.0).stable == hurwitz_stable(A)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(0.1, 1.0))
def test_similarity_invariance(seed, alpha):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3))
    P = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    if np.linalg.cond(P) > 1e3:
        return
    B = P @ A @ np.linalg.inv(P)
    va, vb = verdict(A, alpha), verdict(B, alpha)
    assert abs(va.margin - vb.margin) <= 1e-8
    if abs(va.margin) > 1e-8:
        assert va.stable == vb.stable


def test_time_domain_cross_check():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 6:
        A = rng.normal(size=(2, 2))
        alpha = rng.uniform(0.4, 0.9)
        v = verdict(A, alpha)
        x0 = rng.normal(size=2)
        if v.margin > 0.1:
            sol = abm_solve(FdeProblem(alpha, lambda t, x: A @ x, [x0], 50.0, 2000))
            assert np.linalg.norm(sol.states[-1]) < np.linalg.norm(x0)
            checked += 1
        elif np.all(np.isreal(v.eigenvalues)) and v.margin < -0.1 and v.eigenvalues.real.max() > 0.2:
            sol = abm_solve(FdeProblem(alpha, lambda t, x: A @ x, [x0], 50.0, 2000))
            assert np.linalg.norm(sol.states[-1]) > np.linalg.norm(x0)
            checked += 1


# --- square inequality audit -------------------------------------------------


def test_audit_constant_signal():
    rep = audit_fractional_square_inequality(SampledSignal(0.0, 1e-3, np.full(1001, 2.0)), 0.5)
    assert rep.passed and rep.max_violation == 0.0
    assert np.all(rep.lhs == 0) and np.all(rep.rhs == 0)


def test_audit_linear_signal_margin():
    h = 1e-3
    s = SampledSignal.from_function(lambda t: t, 1.0, h)
    rep = audit_fractional_square_inequality(s, 0.5)
    assert rep.passed
    t = s.times
    gap = t**1.5 * (1 / math.gamma(1.5) - 1 / math.gamma(2.5))
    np.testing.assert_allclose(rep.rhs - rep.lhs, gap, atol=5e-3)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("f", [lambda t: t, lambda t: t**2, np.sin, lambda t: np.exp(-t)])
def test_audit_passes_on_smooth_signals(alpha, f):
    s = SampledSignal.from_function(f, 1.0, 1e-3)
    rep = audit_fractional_square_inequality(s, alpha)
    assert rep.passed, (rep.max_violation, rep.tolerance)


def test_audit_sine_regression_margin():
    s = SampledSignal.from_function(np.sin, 1.0, 1e-3)
    rep = audit_fractional_square_inequality(s, 0.3)
    # the discrete inequality holds with room to spare on this signal
    assert rep.max_violation <= 0.0
    assert float(np.min(rep.rhs[1:] - rep.lhs[1:])) > 0.0
