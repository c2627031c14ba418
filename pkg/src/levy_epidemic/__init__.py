"""Jump-diffusion SIS/SIRS epidemic simulation and stability analysis.

The package simulates compartment epidemic models perturbed by Brownian
contact noise and finite-activity compound-Poisson jumps, evaluates the
closed-form disease-free-equilibrium stability conditions for both
systems, and cross-validates the analytic generators and exit
probabilities against Monte Carlo oracles.
"""

from .analysis import (EnsembleSummary, ExitProblem, ExitSolution,
                       GeneratorCheck, McExitResult, dynkin_generator_check,
                       estimate_extinction, estimate_hitting_time,
                       mc_exit_probability, solve_exit_probability)
from .errors import (ConditionNotApplicableError, ConfigError,
                     InfeasibleConstantsError, LevyEpidemicError,
                     NumericalFailureError)
from .figures import PANELS, Panel, VerdictRow, panel_verdict, verdict_table
from .integrator import SimConfig, Trajectory, simulate_path, step
from .jumps import (ConstantJump, DiscreteMarks, JumpEvents, JumpIntegrals,
                    JumpSpec, PiecewiseLinearJump, PointMass, UniformMarks,
                    compute_jump_integrals, sample_jump_events)
from .models import (SimplexState, SisParams, SirsParams,
                     deterministic_equilibria, sirs_coefficients,
                     sis_diffusion, sis_drift, sis_jump_amplitude)
from .rng import RngStream, sample_brownian_increment
from .stability import (LyapunovConstants, StabilityVerdict,
                        check_lyapunov_constants, find_lyapunov_constants,
                        sirs_dfe_condition, sirs_generator_f,
                        sis_deterministic_threshold, sis_dfe_condition,
                        sis_dfe_condition_positive, sis_generator_g)

__version__ = "0.1.0"

__all__ = [
    "ConditionNotApplicableError",
    "ConfigError",
    "ConstantJump",
    "DiscreteMarks",
    "EnsembleSummary",
    "ExitProblem",
    "ExitSolution",
    "GeneratorCheck",
    "InfeasibleConstantsError",
    "JumpEvents",
    "JumpIntegrals",
    "JumpSpec",
    "LevyEpidemicError",
    "LyapunovConstants",
    "McExitResult",
    "NumericalFailureError",
    "PANELS",
    "Panel",
    "PiecewiseLinearJump",
    "PointMass",
    "RngStream",
    "SimConfig",
    "SimplexState",
    "SirsParams",
    "SisParams",
    "StabilityVerdict",
    "Trajectory",
    "UniformMarks",
    "VerdictRow",
    "check_lyapunov_constants",
    "compute_jump_integrals",
    "deterministic_equilibria",
    "dynkin_generator_check",
    "estimate_extinction",
    "estimate_hitting_time",
    "find_lyapunov_constants",
    "mc_exit_probability",
    "panel_verdict",
    "sample_brownian_increment",
    "sample_jump_events",
    "simulate_path",
    "sirs_coefficients",
    "sirs_dfe_condition",
    "sirs_generator_f",
    "sis_deterministic_threshold",
    "sis_dfe_condition",
    "sis_dfe_condition_positive",
    "sis_diffusion",
    "sis_drift",
    "sis_generator_g",
    "sis_jump_amplitude",
    "solve_exit_probability",
    "step",
    "verdict_table",
]
