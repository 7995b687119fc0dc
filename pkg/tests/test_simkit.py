from __future__ import annotations

import math
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from fogpss.config import bundled_config_path, load_config
from fogpss.controllers import FogpssConfig, PssGains
from fogpss.errors import AssumptionViolation, BlowUpError
from fogpss.fraccalc import caputo_derivative, rl_integral, SampledSignal
from fogpss.plants import (
    FirstOrderPlant,
    MeasurementModel,
    PlantBounds,
    RobotPlant,
    catalog_function,
    constant_reference,
)
from fogpss.reproduce import default_robot_experiment
from fogpss.simkit import (
    TRACE_COLUMNS,
    LambdaTrackerConfig,
    RobotExperiment,
    SimConfig,
    entry_time,
    pss_robot_experiment,
    simulate,
    simulate_batch,
)


@pytest.fixture(scope="module")
def fig5_config():
    return load_config(bundled_config_path("paper_fig5.cfg")).sim


@pytest.fixture(scope="module")
def fig5_trace(fig5_config):
    return simulate(fig5_config)


def open_loop_config(**kw):
    plant = FirstOrderPlant(1.0, 1.5, catalog_function("zero"), PlantBounds(0.5, 1.5, 1.0, 2.0, 0.5))
    base = dict(
        h=0.01, T=2.0, plant=plant, reference=constant_reference(0.5, 3.0, 0.5),
        measurement=MeasurementModel(catalog_function("zero"), 0.1, 1.5, 0.5), controller=None, x0=0.5,
    )
    base.update(kw)
    return SimConfig(**base)


# --- configuration ------------------------------------------------------------------


def test_config_invariants():
    with pytest.raises(ValueError):
        open_loop_config(h=0.0)
    with pytest.raises(ValueError):
        open_loop_config(T=0.001)
    with pytest.raises(ValueError):
        open_loop_config(h=1e-6, T=2.0)
    with pytest.raises(ValueError):
        open_loop_config(scheme="euler")
    with pytest.raises(ValueError):
        open_loop_config(controller=FogpssConfig(10, 12, 0.3, 0.3, 5.5))  # order differs from channel


def test_digest_is_stable_and_sensitive():
    a, b = open_loop_config(), open_loop_config()
    assert a.digest() == b.digest() and len(a.digest()) == 16
    assert open_loop_config(seed=1).digest() != a.digest()


# --- open loop ----------------------------------------------------------------------


@pytest.mark.parametrize("scheme", ["implicit", "zoh-rk4"])
def test_open_loop_decay_and_measurement_identity(scheme):
    tr = simulate(open_loop_config(scheme=scheme))
    # x' = -x from x0 = 0.5 with x_d = 0.5, so x_e = 0.5 (1 - e^{-t})
    np.testing.assert_allclose(tr.x, 0.5 * np.exp(-tr.t), atol=1e-5)
    np.testing.assert_allclose(tr.x_e, 0.5 * (1 - np.exp(-tr.t)), atol=1e-5)
    assert np.array_equal(tr.xe_tilde, tr.x_e)
    assert np.all(tr.u == 0)
    assert tr.bound_radius is None


# --- the bundled example -------------------------------------------------------------


def test_fig5_column_invariants(fig5_trace):
    tr = fig5_trace
    n = len(tr.t)
    assert all(len(getattr(tr, c)) == n for c in TRACE_COLUMNS)
    assert n == 6001
    assert np.array_equal(tr.x_e, tr.x_d - tr.x)
    assert np.array_equal(tr.xe_tilde, tr.x_e - tr.extras["I_omega"])


def test_fig5_measurement_integral_matches_operator(fig5_trace):
    tr = fig5_trace
    sig = SampledSignal(0.0, 0.01, tr.extras["omega"])
    np.testing.assert_allclose(tr.extras["I_omega"], rl_integral(sig, 0.3).values, rtol=1e-12, atol=1e-15)


def test_fig5_stays_in_bound(fig5_trace):
    tr = fig5_trace
    assert tr.bound_radius == pytest.approx(1.81)
    assert np.abs(tr.x_e[tr.t >= 5.0]).max() <= 1.81
    assert tr.meta["entry_time"] is not None


def test_fig5_regression_values(fig5_trace):
    # recorded at first build
    tr = fig5_trace
    assert tr.entry_time(0.3) == pytest.approx(0.07, abs=0.011)
    assert tr.entry_time(0.3, "xe_tilde") == pytest.approx(0.09, abs=0.011)
    assert np.abs(tr.x_e[tr.t >= 5.0]).max() == pytest.approx(0.0419, abs=2e-3)


def test_fig5_refinement_stability(fig5_config, fig5_trace):
    fine = simulate(replace(fig5_config, h=0.005))
    assert abs(fine.x_e[-1] - fig5_trace.x_e[-1]) <= 5e-3


def test_fig5_determinism(fig5_config, fig5_trace):
    again = simulate(fig5_config)
    for c in TRACE_COLUMNS:
        assert np.array_equal(getattr(again, c), getattr(fig5_trace, c))
    assert again.meta == fig5_trace.meta


def test_fig5_descent_proxy(fig5_trace):
    # outside the bound ball the L1 estimate of D^a (x_e^2 / 2) must not be positive;
    # the check is repeated on the smaller 0.3 ball, which the run leaves only later
    tr = fig5_trace
    d = caputo_derivative(SampledSignal(0.0, 0.01, 0.5 * tr.x_e**2), 0.3).values
    for radius in (tr.bound_radius, 0.3):
        outside = np.abs(tr.x_e) > radius
        assert outside[0]
        assert np.all(d[outside] <= 0.0)
    assert np.count_nonzero(np.abs(tr.x_e) > 0.3) > 3


def test_fig5_opposite_sign_diverges(fig5_config):
    with pytest.raises(BlowUpError):
        simulate(replace(fig5_config, negate_u=True))


def test_explicit_scheme_needs_small_step(fig5_config):
    with pytest.raises(BlowUpError):
        simulate(replace(fig5_config, scheme="zoh-rk4"))
    tr = simulate(replace(fig5_config, scheme="zoh-rk4", h=0.001, T=5.0))
    assert np.abs(tr.x_e[-100:]).max() < 0.05


def test_measurement_violation_is_reported(fig5_config):
    loud = MeasurementModel(lambda e, t: 0.2 * math.cos(t), 0.1, 1.5, 0.3)
    with pytest.raises(AssumptionViolation, match="measurement bounds"):
        simulate(replace(fig5_config, measurement=loud, T=1.0))


def test_batch_keeps_order(fig5_config):
    cfgs = [replace(fig5_config, T=2.0, x0=x0) for x0 in (-1.5, 0.0, 1.0)]
    out = simulate_batch(cfgs, max_workers=3)
    for cfg, tr in zip(cfgs, out):
        assert tr.x[0] == cfg.x0
        assert np.array_equal(tr.x, simulate(cfg).x)


# --- lambda tracker in the loop ----------------------------------------------------


def test_lambda_tracker_loop():
    cfg = load_config(bundled_config_path("lambda_tracker.cfg")).sim
    tr = simulate(cfg)
    k = tr.extras["k"]
    assert np.all(np.diff(k) >= 0)
    e = np.abs(tr.xe_tilde)
    frozen = e[1:] < cfg.controller.lam
    assert np.all(np.diff(k)[frozen] == 0)
    assert tr.entry_time(cfg.controller.lam + 0.05, "xe_tilde") is not None


def test_fixed_gain_is_not_enough():
    cfg = load_config(bundled_config_path("lambda_tracker.cfg")).sim
    frozen = replace(cfg, controller=LambdaTrackerConfig(lam=100.0, alpha=0.5, k0=1.0))
    tr = simulate(frozen)
    assert np.all(tr.extras["k"] == 1.0)
    assert np.abs(tr.x_e[tr.t >= 30]).max() > cfg.controller.lam + 0.05


# --- entry time ---------------------------------------------------------------------


def _trace(t, x_e):
    return SimpleNamespace(t=np.asarray(t), x_e=np.asarray(x_e))


def test_entry_time_cases():
    t = np.linspace(0, 20, 2001)
    assert entry_time(_trace(t, np.zeros_like(t)), 0.1) == 0.0
    assert entry_time(_trace(t, np.ones_like(t)), 0.1) is None
    # |x_e| = 2 exp(-a t) crosses 0.5 exactly at t = 12.34
    a = math.log(4) / 12.34
    t_star = entry_time(_trace(t, 2 * np.exp(-a * t)), 0.5)
    assert t_star == pytest.approx(12.34, abs=t[1] - t[0])
    with pytest.raises(ValueError):
        entry_time(_trace(t, t), 0.0)


def test_entry_time_requires_staying_inside():
    t = np.arange(10.0)
    x = np.array([2, 0, 0, 2, 0, 0, 0, 0, 0, 0.0])
    assert entry_time(_trace(t, x), 1.0) == 4.0


# --- robot experiment ---------------------------------------------------------------


def test_robot_default_radii():
    tr = pss_robot_experiment(default_robot_experiment())
    np.testing.assert_allclose(tr.radius, [0.71, 0.71])
    assert all(t is not None for t in tr.entry_times)
    assert np.all(tr.derivative_ok)


def test_robot_noise_free_radius_is_epsilon():
    tr = pss_robot_experiment(default_robot_experiment(noise=False))
    np.testing.assert_allclose(tr.radius, [0.2, 0.2])
    assert all(t is not None for t in tr.entry_times)
    assert np.all(tr.derivative_ok)


def test_robot_zero_initial_error_stays_inside():
    z = catalog_function("zero")
    robot = RobotPlant(np.diag([1.0, 0.5]), [z, z], [0.2, 0.2])
    refs = [constant_reference(0.3, 1.0, 1.0), constant_reference(-0.2, 1.0, 1.0)]
    gains = PssGains([20.0, 10.0], [5.0, 5.0], 0.2, [0.2, 0.2])
    exp = RobotExperiment(robot, refs, [z, z], 0.0, 0.0, gains, 0.01, 5.0, [0.3, -0.2], [0.0, 0.0])
    tr = pss_robot_experiment(exp)
    assert tr.entry_times == [0.0, 0.0]
    assert np.abs(tr.e).max() <= 0.2


def test_robot_measurement_bound_enforced():
    exp = default_robot_experiment()
    loud = replace(exp, omegas=[catalog_function("cos-time", amplitude=0.5)] * 2)
    with pytest.raises(AssumptionViolation, match="measurement bounds"):
        pss_robot_experiment(loud)


def test_robot_reference_count_checked():
    exp = default_robot_experiment()
    with pytest.raises(ValueError):
        replace(exp, references=exp.references[:1])
