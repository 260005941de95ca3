"""Meshfree kernel collocation for Zakai equations with Wendland kernels."""

__version__ = "0.1.0"

from .backend import NAME as BACKEND
from .fd_baseline import FdScheme, build_fd, fd_run
from .grid import CollocationGrid, distances, radius_schedule, uniform_grid, uniform_grid_1d
from .interpolation import (
    FactorizationError,
    InterpolationSystem,
    build_system,
    cardinal_derivative_row,
    conditioning_report,
    interpolate,
    iota_diagnostic,
)
from .kernels import WendlandKernel, generate_wendland, kernel_derivative, kernel_eval
from .models import (
    Jet,
    ZakaiModel,
    apply_L0,
    apply_Lk,
    closed_form_solution,
    exact_solution,
    get_model,
    tanh_drift_model,
)
from .solver import Propagators, SolverRun, build_propagators, generate_wiener, run, step

__all__ = [
    "BACKEND",
    "CollocationGrid",
    "FactorizationError",
    "FdScheme",
    "InterpolationSystem",
    "Jet",
    "Propagators",
    "SolverRun",
    "WendlandKernel",
    "ZakaiModel",
    "apply_L0",
    "apply_Lk",
    "build_fd",
    "build_propagators",
    "build_system",
    "cardinal_derivative_row",
    "closed_form_solution",
    "conditioning_report",
    "distances",
    "exact_solution",
    "fd_run",
    "generate_wendland",
    "generate_wiener",
    "get_model",
    "interpolate",
    "iota_diagnostic",
    "kernel_derivative",
    "kernel_eval",
    "radius_schedule",
    "run",
    "step",
    "tanh_drift_model",
    "uniform_grid",
    "uniform_grid_1d",
]
