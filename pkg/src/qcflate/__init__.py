"""Compile, simulate and tomograph three-to-two qubit compression circuits."""

from .circuit import Circuit, CircuitError, CouplingMap, adjoint, circuit_unitary, depth, gate_counts
from .compression import InputStateLabel, build_compression_circuit, build_decompression_circuit, compression_angles
from .transpiler import PassConfig, TranspileReport, transpile

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitError",
    "CouplingMap",
    "InputStateLabel",
    "PassConfig",
    "TranspileReport",
    "adjoint",
    "build_compression_circuit",
    "build_decompression_circuit",
    "circuit_unitary",
    "compression_angles",
    "depth",
    "gate_counts",
    "transpile",
]
