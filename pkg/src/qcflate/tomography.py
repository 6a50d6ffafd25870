"""Two-qubit state tomography by linear inversion.

Setting and operator labels are two characters, the first for tomography
qubit 0 and the second for qubit 1. In measured bitstrings qubit 0 is the
rightmost character.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Instruction, gate_matrix, measure, rz, sx
from .simulator.statevector import StateVector

BASES = "XYZ"
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}
OPERATORS = tuple(a + b for a, b in itertools.product("IXYZ", repeat=2) if a + b != "II")


class TomographyError(ValueError):
    pass


def _rotation(basis: str, q: int) -> list[Instruction]:
    """Gates taking the +1 eigenstate of ``basis`` to |0>."""
    if basis == "X":
        return [rz(math.pi / 2, q), sx(q)]
    if basis == "Y":
        return [sx(q)]
    return []


@dataclass(frozen=True)
class TomographySetting:
    label: str  # e.g. "XZ": X on tomography qubit 0, Z on qubit 1

    def rotations(self, qubits: Sequence[int] = (0, 1)) -> list[Instruction]:
        return [inst for b, q in zip(self.label, qubits) for inst in _rotation(b, q)]


def tomography_settings() -> list[TomographySetting]:
    return [TomographySetting(a + b) for a, b in itertools.product(BASES, repeat=2)]


def tomography_plan(state_circuit: Circuit, kept: Sequence[int]) -> list[tuple[TomographySetting, Circuit]]:
    """One measurement circuit per setting; tomography qubit k is read into clbit k."""
    out = []
    for s in tomography_settings():
        tail = s.rotations(kept) + [measure(q, k) for k, q in enumerate(kept)]
        body = Circuit(state_circuit.num_qubits, state_circuit.instructions, max(2, state_circuit.num_clbits))
        out.append((s, body.append(*tail)))
    return out


def _rotation_matrix(basis: str) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for inst in _rotation(basis, 0):
        m = gate_matrix(inst.kind) @ m
    return m


def setting_probabilities(rho: np.ndarray, setting: TomographySetting) -> np.ndarray:
    """Exact outcome distribution (index bit k = tomography qubit k) for a 2-qubit ``rho``."""
    u = np.kron(_rotation_matrix(setting.label[1]), _rotation_matrix(setting.label[0]))
    return np.clip(np.diag(u @ rho @ u.conj().T).real, 0, None)


def exact_counts(rho: np.ndarray, shots: int | None = None) -> dict[str, dict[str, float]]:
    """Outcome frequencies for every setting (probabilities, or expected counts if ``shots``)."""
    out = {}
    for s in tomography_settings():
        p = setting_probabilities(rho, s)
        scale = shots or 1
        out[s.label] = {format(i, "02b"): float(v * scale) for i, v in enumerate(p)}
    return out


def expectation_values(counts: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """The 15 non-identity two-qubit Pauli expectations from per-setting counts.

    Correlators come from their own setting; single-qubit terms such as
    ``XI`` average the three settings that measure X on qubit 0.
    """
    missing = [s.label for s in tomography_settings() if s.label not in counts]
    if missing:
        raise TomographyError(f"missing settings: {missing}")
    parity: dict[str, dict[str, float]] = {}
    for s in tomography_settings():
        table = counts[s.label]
        total = sum(table.values())
        if total <= 0:
            raise TomographyError(f"setting {s.label} has no shots")
        e0 = e1 = e01 = 0.0
        for bits, c in table.items():
            b0, b1 = int(bits[-1]), int(bits[-2])
            e0 += (-1) ** b0 * c
            e1 += (-1) ** b1 * c
            e01 += (-1) ** (b0 + b1) * c
        parity[s.label] = {"0": e0 / total, "1": e1 / total, "01": e01 / total}
    out = {}
    for op in OPERATORS:
        p, q = op
        if p != "I" and q != "I":
            out[op] = parity[op]["01"]
        elif q == "I":
            out[op] = float(np.mean([parity[p + b]["0"] for b in BASES]))
        else:
            out[op] = float(np.mean([parity[b + q]["1"] for b in BASES]))
    return out


def linear_inversion(expectations: Mapping[str, float]) -> np.ndarray:
    """``(1/4) (I + sum e_PQ P x Q)``; Hermitian and unit-trace, not necessarily PSD."""
    rho = np.eye(4, dtype=complex)
    for op in OPERATORS:
        p, q = op
        rho += expectations[op] * np.kron(PAULI[q], PAULI[p])
    return rho / 4


def project_to_physical(rho: np.ndarray) -> np.ndarray:
    """Nearest unit-trace PSD matrix by eigenvalue clipping with uniform redistribution."""
    rho = (np.asarray(rho, dtype=complex) + np.asarray(rho, dtype=complex).conj().T) / 2
    w, v = np.linalg.eigh(rho)
    w = w / w.sum().real
    order = np.argsort(w)[::-1]  # descending
    lam = w[order].real.copy()
    acc = 0.0
    i = len(lam)
    # walk up from the most negative eigenvalue, zeroing while the spread deficit keeps it negative
    while i > 0 and lam[i - 1] + acc / i < 0:
        acc += lam[i - 1]
        lam[i - 1] = 0.0
        i -= 1
    lam[:i] += acc / i
    vecs = v[:, order]
    return (vecs * lam) @ vecs.conj().T


def state_fidelity_to(rho: np.ndarray, target: StateVector) -> float:
    t = target.amplitudes
    if rho.shape != (t.size, t.size):
        raise TomographyError("dimension mismatch")
    return float(np.clip(np.vdot(t, rho @ t).real, 0.0, 1.0))


def fidelity_report(rho: np.ndarray, target: StateVector) -> float:
    """Fidelity of the physically projected ``rho`` to a pure target."""
    if np.asarray(rho).shape != (4, 4) or target.amplitudes.size != 4:
        raise TomographyError("fidelity_report expects two-qubit states")
    return state_fidelity_to(project_to_physical(rho), target)


def reconstruct(counts: Mapping[str, Mapping[str, float]]) -> np.ndarray:
    return project_to_physical(linear_inversion(expectation_values(counts)))


def save_counts(path: str | Path, counts: Mapping[str, Mapping[str, int]]) -> None:
    Path(path).write_text(json.dumps({k: dict(sorted(v.items())) for k, v in sorted(counts.items())}, indent=2))


def load_counts(path: str | Path) -> dict[str, dict[str, int]]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise TomographyError(f"{path}: expected a map from setting label to counts")
    return data
