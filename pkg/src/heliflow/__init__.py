"""Helically symmetric transonic Euler flow in a concentric cylinder."""

from .background import (BackgroundFlow, CoefficientTable, GasInflow, coefficient_table,
                         critical_step, solve_background, sonic_radius_closed_form)
from .boundary import FourierSeries, HelicalBC, single_mode_bc
from .config import RunConfig, reference_config
from .errors import (ConfigError, HeliflowError, NoConvergence, SolverError, StepTooLarge,
                     ValidationError)
from .fields import AnnulusGrid
from .solver import SolverConfig, SolveReport, fixed_point_solve

__all__ = [
    "AnnulusGrid", "BackgroundFlow", "CoefficientTable", "ConfigError", "FourierSeries",
    "GasInflow", "HelicalBC", "HeliflowError", "NoConvergence", "RunConfig", "SolveReport",
    "SolverConfig", "SolverError", "StepTooLarge", "ValidationError", "coefficient_table",
    "critical_step", "fixed_point_solve", "reference_config", "single_mode_bc",
    "solve_background", "sonic_radius_closed_form",
]
