from .calibration import (
    CalibrationData,
    CalibrationError,
    GateCalibration,
    QubitCalibration,
    load_calibration,
    shipped_calibration_path,
    validate_calibration_text,
)
from .channels import KrausChannel, depolarizing_channel, reset_channel, thermal_relaxation_channel
from .density import DensityMatrix, NoiseModel, measured_qubits, run_density
from .metrics import reduced_density, state_fidelity
from .sampling import ReadoutError, ShotResult, apply_readout, marginal, sample_shots
from .statevector import SimulationError, StateVector, run_ideal

__all__ = [
    "CalibrationData",
    "CalibrationError",
    "DensityMatrix",
    "GateCalibration",
    "KrausChannel",
    "NoiseModel",
    "QubitCalibration",
    "ReadoutError",
    "ShotResult",
    "SimulationError",
    "StateVector",
    "apply_readout",
    "depolarizing_channel",
    "load_calibration",
    "marginal",
    "measured_qubits",
    "reduced_density",
    "reset_channel",
    "run_density",
    "run_ideal",
    "sample_shots",
    "shipped_calibration_path",
    "state_fidelity",
    "thermal_relaxation_channel",
    "validate_calibration_text",
]
