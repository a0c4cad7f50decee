"""memgrid: vacancy-transport memristor model, impedance decomposition,
hysteresis audits and a rule engine for the periodic table of passive
elements."""

from . import device_model, element_table, impedance, kernels, simulator
from .device_model import BoundaryTrajectory, DeviceParams, Window
from .errors import (
    CandidateError,
    ConfigError,
    DomainError,
    IntegrityError,
    InvalidGridError,
    MemgridError,
    OutOfRangeError,
    PreconditionError,
    SingularBranchError,
)
from .impedance import decompose, small_flux_limit
from .simulator import DriveSignal, SimConfig, run

__version__ = "0.1.0"
BACKEND = kernels.BACKEND

__all__ = [
    "BACKEND",
    "BoundaryTrajectory",
    "CandidateError",
    "ConfigError",
    "DeviceParams",
    "DomainError",
    "DriveSignal",
    "IntegrityError",
    "InvalidGridError",
    "MemgridError",
    "OutOfRangeError",
    "PreconditionError",
    "SimConfig",
    "SingularBranchError",
    "Window",
    "decompose",
    "device_model",
    "element_table",
    "impedance",
    "kernels",
    "run",
    "simulator",
    "small_flux_limit",
]
