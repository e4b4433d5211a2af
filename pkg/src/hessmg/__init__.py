"""Joint sizing and dispatch optimization of a truck-charging microgrid
with a hybrid energy storage system (battery, supercapacitor, flywheel).
"""

from .data import (EssSpec, GridSpec, Horizon, HistoricalDay, PvSpec, SourceSpec,
                   load_catalog, load_dataset, make_demo_dataset)
from .scenario import ScenarioModel, build_scenario
from .builder import ProblemData, build
from .costs import CostBreakdown, audit, npv_factor
from .solve import SolveOptions, Solution, solve, verify
from .mps import read_mps, write_mps
from .run import DesignResult, ExperimentConfig, RunContext, run_experiments, run_one

__version__ = "0.1.0"

__all__ = [
    "EssSpec", "GridSpec", "Horizon", "HistoricalDay", "PvSpec", "SourceSpec",
    "load_catalog", "load_dataset", "make_demo_dataset",
    "ScenarioModel", "build_scenario",
    "ProblemData", "build",
    "CostBreakdown", "audit", "npv_factor",
    "SolveOptions", "Solution", "solve", "verify",
    "read_mps", "write_mps",
    "DesignResult", "ExperimentConfig", "RunContext", "run_experiments", "run_one",
]
