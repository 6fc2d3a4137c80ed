"""Coverage of 3D indoor terahertz networks: closed-form analysis and Monte Carlo."""

__version__ = "0.1.0"

from .coverage import (Curve, CurvePoint, CoverageResult, coverage, coverage_2d_baseline,
                       coverage_open_office, evaluate, sweep)
from .hitting import Environment, HittingModel, hitting_prob
from .scenario import ConfigError, Scenario, derive_constants, dump_scenario, load_scenario

__all__ = [
    "__version__", "Scenario", "ConfigError", "derive_constants", "load_scenario", "dump_scenario",
    "Environment", "HittingModel", "hitting_prob", "coverage", "coverage_open_office",
    "coverage_2d_baseline", "evaluate", "sweep", "Curve", "CurvePoint", "CoverageResult",
]
