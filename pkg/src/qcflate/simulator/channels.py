"""Kraus channels for gate noise."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .calibration import CalibrationError

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.diag([1.0, -1.0]).astype(complex),
)


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if dim & (dim - 1) or any(k.shape != (dim, dim) for k in ops):
            raise ChannelError("Kraus operators must share one 2^k x 2^k shape")
        total = sum(k.conj().T @ k for k in ops)
        if not np.allclose(total, np.eye(dim), atol=1e-10):
            raise ChannelError("Kraus operators are not trace preserving")
        object.__setattr__(self, "operators", ops)

    @property
    def num_qubits(self) -> int:
        return self.operators[0].shape[0].bit_length() - 1

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply to a density matrix of matching dimension."""
        return sum(k @ rho @ k.conj().T for k in self.operators)

    def then(self, other: KrausChannel) -> KrausChannel:
        """``other`` applied after ``self``; operators with zero weight are dropped."""
        ops = [b @ a for a in self.operators for b in other.operators]
        return KrausChannel(tuple(k for k in ops if np.abs(k).max() > 0))


def identity_channel(k: int = 1) -> KrausChannel:
    return KrausChannel((np.eye(2**k, dtype=complex),))


def thermal_relaxation_channel(t1_us: float, t2_us: float, duration_ns: float) -> KrausChannel:
    """Amplitude damping toward |0> followed by the extra dephasing needed to reach T2.

    Decay probability is ``1 - exp(-t/T1)``; coherences end up scaled by
    ``exp(-t/T2)``. ``t1_us`` may be ``inf`` for pure dephasing.
    """
    if not t1_us > 0 or not t2_us > 0:
        raise CalibrationError("T1 and T2 must be positive")
    if not math.isinf(t1_us) and t2_us > 2 * t1_us:
        raise CalibrationError(f"T2 = {t2_us} exceeds 2*T1 = {2 * t1_us}")
    if duration_ns < 0:
        raise CalibrationError("duration must be non-negative")
    t = duration_ns / 1000.0
    gamma = 1 - math.exp(-t / t1_us)
    # amplitude damping alone already scales coherences by exp(-t / 2T1)
    f = math.exp(-t / t2_us + t / (2 * t1_us))
    pz = max(0.0, (1 - f) / 2)
    a0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    a1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    z = _PAULIS[3]
    ops = [math.sqrt(1 - pz) * a0, math.sqrt(1 - pz) * a1, math.sqrt(pz) * z @ a0, math.sqrt(pz) * z @ a1]
    return KrausChannel(tuple(k for k in ops if np.abs(k).max() > 0))


def depolarizing_channel(p: float, k: int = 1) -> KrausChannel:
    """``rho -> (1 - p) rho + p I / 2^k`` written as a Pauli-mixing Kraus set."""
    if not 0 <= p <= 1:
        raise ChannelError(f"depolarizing probability {p} outside [0, 1]")
    if k not in (1, 2):
        raise ChannelError("depolarizing channel supports 1 or 2 qubits")
    d2 = 4**k
    ops = []
    for labels in itertools.product(range(4), repeat=k):
        pauli = np.array([[1.0 + 0j]])
        for idx in labels:
            pauli = np.kron(pauli, _PAULIS[idx])
        weight = 1 - p * (d2 - 1) / d2 if not any(labels) else p / d2
        if weight > 0:
            ops.append(math.sqrt(weight) * pauli)
    return KrausChannel(tuple(ops))


def reset_channel(error: float = 0.0) -> KrausChannel:
    """Reset to |0>, then flip to |1> with probability ``error``."""
    k0 = np.array([[1, 0], [0, 0]], dtype=complex)
    k1 = np.array([[0, 1], [0, 0]], dtype=complex)
    x = _PAULIS[1]
    ops = [math.sqrt(1 - error) * k0, math.sqrt(1 - error) * k1]
    if error > 0:
        ops += [math.sqrt(error) * x @ k0, math.sqrt(error) * x @ k1]
    return KrausChannel(tuple(ops))


def measurement_channel() -> KrausChannel:
    """Non-selective Z measurement: removes coherences on the qubit."""
    return KrausChannel((np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)))
