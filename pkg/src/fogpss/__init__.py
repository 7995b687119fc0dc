"""Fractional-order practical tracking control: operators, solver, plants, controllers and simulation."""

from __future__ import annotations

from .abm import ConvergenceEstimate, FdeProblem, FdeSolution, abm_coeff_a, abm_coeff_b, abm_solve, estimate_convergence_order
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .controllers import (
    ADAPTATION_LAWS,
    FogpssConfig,
    FogpssController,
    LambdaTrackerState,
    PssGains,
    fogpss_bound_radius,
    fogpss_control,
    fogpss_min_gain,
    lambda_tracker_step,
    pss_bound_radius,
    pss_control,
    pss_derivative_bound,
    saturate,
)
from .errors import AssumptionViolation, BlowUpError, GainConditionError
from .fraccalc import (
    SampledSignal,
    caputo_at_end,
    caputo_derivative,
    gamma,
    l1_weights,
    mittag_leffler,
    power_rule_caputo,
    power_rule_integral,
    rl_integral,
    rl_weights,
)
from .plants import (
    CatalogFunction,
    FirstOrderPlant,
    MeasurementModel,
    PlantBounds,
    ReferenceSpec,
    RobotPlant,
    catalog_function,
    constant_reference,
    cosine_reference,
    estimate_u_max,
    plant_step_rk4,
    reference_eval,
    robot_step_rk4,
)
from .simkit import (
    LambdaTrackerConfig,
    RobotExperiment,
    RobotTrace,
    SimConfig,
    SimTrace,
    entry_time,
    pss_robot_experiment,
    simulate,
    simulate_batch,
)
from .stability import (
    LinearFoSystem,
    SquareInequalityReport,
    StabilityVerdict,
    audit_fractional_square_inequality,
    check_linear_fo_stability,
    hurwitz_stable,
)

__version__ = "0.1.0"
