"""Density-matrix simulation with calibration-driven gate noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit, Instruction, apply_matrix, gate_matrix
from .calibration import CalibrationData, CalibrationError
from .channels import (
    KrausChannel,
    depolarizing_channel,
    measurement_channel,
    reset_channel,
    thermal_relaxation_channel,
)
from .statevector import SimulationError, StateVector

MAX_DENSITY_QUBITS = 10

# Rz is a frame change on hardware: no duration, no error
VIRTUAL_GATES = frozenset({"rz"})


@dataclass(frozen=True)
class DensityMatrix:
    data: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.data, dtype=complex)
        dim = rho.shape[0]
        if rho.shape != (dim, dim) or dim & (dim - 1):
            raise SimulationError("density matrix must be 2^n x 2^n")
        if not np.allclose(rho, rho.conj().T, atol=1e-10):
            raise SimulationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise SimulationError(f"density matrix trace {np.trace(rho).real:.12g} differs from 1")
        if np.linalg.eigvalsh(rho).min() < -1e-8:
            raise SimulationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "data", rho)

    @classmethod
    def from_statevector(cls, state: StateVector) -> DensityMatrix:
        return cls(state.projector())

    @classmethod
    def zero(cls, n: int) -> DensityMatrix:
        return cls.from_statevector(StateVector.zero(n))

    @property
    def num_qubits(self) -> int:
        return self.data.shape[0].bit_length() - 1

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.data).real, 0, None)

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))


def apply_operator(rho: np.ndarray, op: np.ndarray, qubits, n: int) -> np.ndarray:
    """``op rho op^dagger`` with ``op`` acting on ``qubits``."""
    dim = 2**n
    left = apply_matrix(rho.reshape((2,) * n + (dim,)), op, qubits, n).reshape(dim, dim)
    both = apply_matrix(left.conj().T.reshape((2,) * n + (dim,)), op, qubits, n).reshape(dim, dim)
    return both.conj().T


def apply_channel(rho: np.ndarray, channel: KrausChannel, qubits, n: int) -> np.ndarray:
    return sum(apply_operator(rho, k, qubits, n) for k in channel.operators)


@dataclass
class NoiseModel:
    """Gate noise derived from a :class:`CalibrationData`.

    After every non-virtual gate each operand relaxes for the gate duration
    (T1/T2), then the gate's depolarizing channel acts on all operands.
    ``depolarizing_scale`` multiplies every depolarizing probability.
    """

    calibration: CalibrationData
    depolarizing_scale: float = 1.0

    def __post_init__(self):
        self._cache: dict[tuple, list[tuple[KrausChannel, tuple[int, ...]]]] = {}

    def channels_for(self, inst: Instruction) -> list[tuple[KrausChannel, tuple[int, ...]]]:
        key = (inst.name, inst.qubits)
        if key not in self._cache:
            self._cache[key] = self._build(inst)
        return self._cache[key]

    def _build(self, inst: Instruction) -> list[tuple[KrausChannel, tuple[int, ...]]]:
        cal = self.calibration
        name, qs = inst.name, inst.qubits
        for q in qs:
            cal.qubit(q)
        if name in VIRTUAL_GATES or name in ("barrier", "measure"):
            return []
        if name == "reset":
            return [(reset_channel(cal.reset_error), qs)]
        if len(qs) == 1:
            gate = cal.gates_1q
        elif name == "cx":
            gate = cal.cnot_gate(*qs)
        else:
            raise CalibrationError(f"noise model covers basis gates only, got {name}")
        out = []
        for q in qs:
            qc = cal.qubit(q)
            out.append((thermal_relaxation_channel(qc.t1_us, qc.t2_us, gate.duration_ns), (q,)))
        p = min(1.0, gate.depolarizing * self.depolarizing_scale)
        if p > 0:
            out.append((depolarizing_channel(p, len(qs)), qs))
        return out


def run_density(
    circuit: Circuit,
    noise: NoiseModel | None = None,
    initial: DensityMatrix | None = None,
) -> DensityMatrix:
    """Evolve a density matrix through ``circuit``.

    Measurements act as non-selective Z measurements (readout error is applied
    when sampling, not here). Reset replaces the qubit's state with |0>.
    """
    n = circuit.num_qubits
    if n > MAX_DENSITY_QUBITS:
        raise SimulationError(f"density simulation is limited to {MAX_DENSITY_QUBITS} qubits")
    rho = (initial if initial is not None else DensityMatrix.zero(n)).data
    if rho.shape[0] != 2**n:
        raise SimulationError("initial state width does not match the circuit")
    measure = measurement_channel()
    for inst in circuit.instructions:
        if inst.name == "barrier":
            continue
        if inst.name == "measure":
            rho = apply_channel(rho, measure, inst.qubits, n)
        elif inst.name == "reset":
            if noise is None:
                rho = apply_channel(rho, reset_channel(), inst.qubits, n)
        else:
            rho = apply_operator(rho, gate_matrix(inst.kind), inst.qubits, n)
        if noise is not None:
            for channel, qubits in noise.channels_for(inst):
                rho = apply_channel(rho, channel, qubits, n)
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def measured_qubits(circuit: Circuit) -> dict[int, int]:
    """Classical bit -> qubit for the last measurement written to each bit."""
    out = {}
    for inst in circuit.instructions:
        if inst.name == "measure":
            out[inst.kind.clbit] = inst.qubits[0]
    return dict(sorted(out.items()))
