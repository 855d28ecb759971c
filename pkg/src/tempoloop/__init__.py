"""Parallel-in-time integration of a temporally homogenized plaque growth model."""
from .estimators import GrowthTableRegressor, PararealIntegrator, TwoScaleIntegrator
from .exceptions import (
    ConfigError,
    DomainError,
    LumenClosureError,
    NonConvergenceError,
    TempoloopError,
)
from .growth import FoamCellState, GrowthParams, growth_function, growth_rate, macro_euler_step
from .micro import (
    AveragedGrowth,
    MicroConfig,
    MicroPropagator,
    MicroState,
    SurrogateChannelFlow,
    inflow,
    periodic_average,
    run_cycle,
    wall_shear,
)
from .parareal import (
    CostLedger,
    GrowthTable,
    Parareal,
    PararealConfig,
    PararealResult,
    interpolate_growth,
    optimal_process_count,
    serial_equivalent_cost,
)
from .twoscale import MacroGrid, TrajectorySegment, propagate, serial_reference

__version__ = "0.1.0"

__all__ = [
    "GrowthTableRegressor",
    "PararealIntegrator",
    "TwoScaleIntegrator",
    "ConfigError",
    "DomainError",
    "LumenClosureError",
    "NonConvergenceError",
    "TempoloopError",
    "FoamCellState",
    "GrowthParams",
    "growth_function",
    "growth_rate",
    "macro_euler_step",
    "AveragedGrowth",
    "MicroConfig",
    "MicroPropagator",
    "MicroState",
    "SurrogateChannelFlow",
    "inflow",
    "periodic_average",
    "run_cycle",
    "wall_shear",
    "CostLedger",
    "GrowthTable",
    "Parareal",
    "PararealConfig",
    "PararealResult",
    "interpolate_growth",
    "optimal_process_count",
    "serial_equivalent_cost",
    "MacroGrid",
    "TrajectorySegment",
    "propagate",
    "serial_reference",
]
