"""Crack growth with a history-dependent cohesive zone.

A straight crack under constant remote load carries a cohesive zone whose
traction follows a non-local (hereditary) yield condition.  The package
solves the stationary and propagating stages on a time mesh, for an elastic
or a standard-linear-solid viscoelastic body, and provides mesh-convergence
tooling and a ``czcrack`` command line.
"""
from .abel import YieldParams, damage_integral, validate_gamma
from .analysis import aitken, convergence_rate, mesh_study
from .config import PhysicalParams, RunConfig, normalize_physical
from .solver import (CrackSolver, MaterialParams, SolverSettings, Trajectory,
                     find_delay_time, jump_analysis, run_simulation)
from .viscoelastic import CreepParams

__version__ = "0.1.0"

__all__ = [
    "CrackSolver", "CreepParams", "MaterialParams", "PhysicalParams", "RunConfig",
    "SolverSettings", "Trajectory", "YieldParams", "aitken", "convergence_rate",
    "damage_integral", "find_delay_time", "jump_analysis", "mesh_study",
    "normalize_physical", "run_simulation", "validate_gamma",
]
