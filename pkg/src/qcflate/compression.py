"""Three-to-two qubit compression of identical pure states.

Three copies of |psi> are mapped onto two qubits (0 and 1) with qubit 2 left in
|0>, so qubit 2 can be discarded or reset and the map undone later.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .circuit import (
    Circuit,
    CircuitError,
    GateKind,
    Instruction,
    adjoint,
    barrier,
    ccx,
    ch,
    cu3,
    cx,
    inverse_instructions,
    measure,
    reset,
    u3,
    u3_matrix,
)
from .simulator.metrics import reduced_density
from .simulator.statevector import StateVector, run_ideal
from .transpiler.routing import LayoutPermutation
from .transpiler.synthesis import decompose_u3_to_basis

PI = math.pi
ROUNDED_THETA1 = 1.91
ROUNDED_THETA2 = 1.23


class InputStateLabel(enum.Enum):
    ZERO = "0"
    ONE = "1"
    PLUS = "+"
    MINUS = "-"
    Y_PLUS = "y+"
    Y_MINUS = "y-"

    @classmethod
    def parse(cls, text: str) -> InputStateLabel:
        t = text.strip()
        for label in cls:
            if t.upper() == label.name or t.lower() == label.value:
                return label
        raise ValueError(f"unknown input state {text!r}; use one of {[l.name for l in cls]}")


# (theta, phi, lam) of the preparation U3 for each label
_PREP = {
    InputStateLabel.ZERO: (0.0, 0.0, 0.0),
    InputStateLabel.ONE: (PI, 0.0, PI),
    InputStateLabel.PLUS: (PI / 2, 0.0, PI),
    InputStateLabel.MINUS: (PI / 2, PI, PI),
    InputStateLabel.Y_PLUS: (PI / 2, PI / 2, PI),
    InputStateLabel.Y_MINUS: (PI / 2, -PI / 2, PI),
}


@dataclass(frozen=True)
class CompressionAngles:
    theta1: float
    theta2: float


def compression_angles(rounded: bool = False) -> CompressionAngles:
    """Disentangling angles of the two controlled-U3 gates.

    The exact values are ``2 acos(1/sqrt 3)`` and ``acos(1/3)``; ``rounded=True``
    returns the two-decimal roundings 1.91 and 1.23.
    """
    if rounded:
        return CompressionAngles(ROUNDED_THETA1, ROUNDED_THETA2)
    return CompressionAngles(2 * math.acos(1 / math.sqrt(3)), math.acos(1 / 3))


def prep_unitary(label: InputStateLabel) -> GateKind:
    return GateKind("u3", _PREP[label])


def label_state(label: InputStateLabel) -> np.ndarray:
    return u3_matrix(*_PREP[label])[:, 0]


def bloch_state(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def compression_segments(angles: CompressionAngles | None = None) -> tuple[Circuit, Circuit, Circuit]:
    """The compression circuit split as (CX/CH/CCX/CX part, CU3(theta1), CU3(theta2))."""
    a = angles or compression_angles()
    head = Circuit(3, (cx(0, 1), ch(1, 0), ccx(1, 2, 0), cx(2, 1)))
    first = Circuit(3, (cu3(a.theta1, PI, PI, 0, 2),))
    second = Circuit(3, (cu3(a.theta2, 0.0, PI, 1, 2),))
    return head, first, second


def build_compression_circuit(angles: CompressionAngles | None = None) -> Circuit:
    head, first, second = compression_segments(angles)
    return head + first + second


def build_decompression_circuit(angles: CompressionAngles | None = None) -> Circuit:
    return adjoint(build_compression_circuit(angles))


def ideal_compressed_state(source: InputStateLabel | tuple[float, float], angles: CompressionAngles | None = None) -> StateVector:
    """Two-qubit state left on qubits 0 and 1 by ideal compression."""
    psi = label_state(source) if isinstance(source, InputStateLabel) else bloch_state(*source)
    out = run_ideal(build_compression_circuit(angles), StateVector.product(psi, psi, psi))
    amps = out.amplitudes.reshape(2, 4)  # row index = qubit 2
    if np.linalg.norm(amps[0]) ** 2 < 1 - 1e-9:
        raise CircuitError("qubit 2 is not disentangled; compression angles are wrong")
    pair = amps[0] / np.linalg.norm(amps[0])
    return StateVector(pair)


def qubit2_fidelity(psi: np.ndarray, angles: CompressionAngles | None = None) -> float:
    """<0| rho_q2 |0> after compressing three copies of ``psi``."""
    out = run_ideal(build_compression_circuit(angles), StateVector.product(psi, psi, psi))
    return float(reduced_density(out, [2]).data[0, 0].real)


# -- experiment circuits -------------------------------------------------


def _prep_layer(label: InputStateLabel, qubits) -> list[Instruction]:
    out = []
    for q in qubits:
        out += decompose_u3_to_basis(*_PREP[label], qubit=q)
    return out


def _unprep_layer(label: InputStateLabel, qubits) -> list[Instruction]:
    out = []
    for q in qubits:
        for inst in inverse_instructions(u3(*_PREP[label], q)):
            out += decompose_u3_to_basis(*inst.params, qubit=q)
    return out


@dataclass(frozen=True)
class CompressionExperiment:
    label: InputStateLabel
    state_circuit: Circuit  # prep + compression, no measurement
    kept: tuple[int, int]  # physical qubits holding logical 0 and 1
    discarded: int
    plan: tuple  # tomography plan: (setting, circuit) pairs


def build_compression_experiment(
    label: InputStateLabel,
    compression: Circuit | None = None,
    layout: LayoutPermutation | None = None,
) -> CompressionExperiment:
    """Prepare three copies, compress, and tomograph the kept pair.

    ``compression`` may be a transpiled (physical) circuit; ``layout`` says
    where each logical qubit starts and ends, which fixes the discarded qubit.
    """
    from .tomography import tomography_plan

    comp = compression if compression is not None else build_compression_circuit()
    layout = layout or LayoutPermutation.identity(comp.num_qubits)
    prep = Circuit(comp.num_qubits, tuple(_prep_layer(label, layout.initial[:3])))
    state = prep + comp
    kept = (layout.final[0], layout.final[1])
    return CompressionExperiment(label, state, kept, layout.final[2], tuple(tomography_plan(state, kept)))


def build_compdecomp_experiment(
    label: InputStateLabel,
    compression: Circuit | None = None,
    layout: LayoutPermutation | None = None,
    decompression: Circuit | None = None,
) -> Circuit:
    """prep -> compress -> reset qubit 2 -> decompress -> undo prep -> measure.

    Stages are separated by barriers. With a transpiled ``compression`` the
    default decompression is its adjoint, which returns every logical qubit
    to where it started.
    """
    comp = compression if compression is not None else build_compression_circuit()
    n = comp.num_qubits
    layout = layout or LayoutPermutation.identity(n)
    decomp = decompression if decompression is not None else adjoint(comp)
    start, end = layout.initial[:3], layout.final
    insts: list[Instruction] = []
    sync = barrier(*range(n))
    insts += _prep_layer(label, start) + [sync]
    insts += list(comp.instructions) + [sync]
    insts += [reset(end[2]), sync]
    insts += list(decomp.instructions) + [sync]
    insts += _unprep_layer(label, start) + [sync]
    insts += [measure(q, k) for k, q in enumerate(start)]
    return Circuit(n, tuple(insts), 3)
