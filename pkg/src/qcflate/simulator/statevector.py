"""Pure-state simulation by local gate application."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit, CircuitError, apply_matrix, gate_matrix

MAX_STATEVECTOR_QUBITS = 24


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size != 2**n:
            raise SimulationError(f"state length {amps.size} is not a power of two")
        if abs(np.linalg.norm(amps) - 1) > 1e-10:
            raise SimulationError(f"state norm {np.linalg.norm(amps):.12g} differs from 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n: int) -> StateVector:
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1
        return cls(amps)

    @classmethod
    def basis(cls, n: int, index: int) -> StateVector:
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1
        return cls(amps)

    @classmethod
    def product(cls, *qubit_states) -> StateVector:
        """Tensor product of single-qubit vectors, first argument on qubit 0."""
        out = np.array([1.0 + 0j])
        for s in qubit_states:
            out = np.kron(np.asarray(s, dtype=complex), out)
        return cls(out / np.linalg.norm(out))

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def _terminal_measures(circuit: Circuit) -> set[int]:
    """Indices of measurements after which their qubit sees only barriers or measures."""
    out: set[int] = set()
    done: set[int] = set()
    for idx in range(len(circuit.instructions) - 1, -1, -1):
        inst = circuit.instructions[idx]
        if inst.name == "barrier":
            continue
        if inst.name == "measure" and inst.qubits[0] not in done:
            out.add(idx)
            continue
        done.update(inst.qubits)
    return out


def run_ideal(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply ``circuit`` to ``initial`` (default |0...0>).

    Terminal measurements are ignored. Reset is allowed only where the qubit is
    in a computational basis state; anything else needs density simulation.
    """
    n = circuit.num_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise SimulationError(f"statevector simulation is limited to {MAX_STATEVECTOR_QUBITS} qubits")
    state = initial if initial is not None else StateVector.zero(n)
    if state.num_qubits != n:
        raise SimulationError(f"initial state has {state.num_qubits} qubits, circuit has {n}")
    terminal = _terminal_measures(circuit)
    tensor = state.amplitudes.reshape((2,) * n)
    for idx, inst in enumerate(circuit.instructions):
        if inst.name == "barrier" or idx in terminal:
            continue
        if inst.name == "measure":
            raise SimulationError("mid-circuit measurement needs density-matrix simulation")
        if inst.name == "reset":
            q = inst.qubits[0]
            axis = n - 1 - q
            p1 = float(np.sum(np.abs(np.take(tensor, 1, axis=axis)) ** 2))
            if p1 < 1e-12:
                continue
            if p1 > 1 - 1e-12:
                tensor = apply_matrix(tensor, np.array([[0, 1], [1, 0]], dtype=complex), (q,), n)
                continue
            raise SimulationError(f"reset of qubit {q} in superposition needs density-matrix simulation")
        try:
            matrix = gate_matrix(inst.kind)
        except CircuitError as exc:
            raise SimulationError(str(exc)) from exc
        tensor = apply_matrix(tensor, matrix, inst.qubits, n)
    amps = tensor.reshape(-1)
    return StateVector(amps / np.linalg.norm(amps))
