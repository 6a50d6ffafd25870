"""Partial trace and fidelity."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .density import DensityMatrix
from .statevector import SimulationError, StateVector

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _as_matrix(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.projector()
    if isinstance(state, DensityMatrix):
        return state.data
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state).__name__}")


def reduced_density(state: StateVector | DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every qubit not in ``keep``; ``keep[0]`` becomes qubit 0."""
    rho = _as_matrix(state)
    n = rho.shape[0].bit_length() - 1
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise SimulationError(f"invalid qubits to keep: {keep}")
    rows = [_LETTERS[2 * q] for q in range(n)]
    cols = [_LETTERS[2 * q + 1] if q in keep else _LETTERS[2 * q] for q in range(n)]
    # axis i of the tensor is qubit n - 1 - i
    src = "".join(rows[q] for q in reversed(range(n))) + "".join(cols[q] for q in reversed(range(n)))
    dst = "".join(rows[q] for q in reversed(keep)) + "".join(cols[q] for q in reversed(keep))
    out = np.einsum(f"{src}->{dst}", rho.reshape((2,) * (2 * n)))
    k = len(keep)
    return DensityMatrix(out.reshape(2**k, 2**k))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def state_fidelity(a: StateVector | DensityMatrix, b: StateVector | DensityMatrix) -> float:
    """Uhlmann fidelity, squared convention (1 for identical states)."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        if a.amplitudes.size != b.amplitudes.size:
            raise SimulationError("dimension mismatch")
        f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    elif isinstance(a, StateVector) or isinstance(b, StateVector):
        pure, mixed = (a, b) if isinstance(a, StateVector) else (b, a)
        rho = _as_matrix(mixed)
        if rho.shape[0] != pure.amplitudes.size:
            raise SimulationError("dimension mismatch")
        f = np.vdot(pure.amplitudes, rho @ pure.amplitudes).real
    else:
        ra, rb = _as_matrix(a), _as_matrix(b)
        if ra.shape != rb.shape:
            raise SimulationError("dimension mismatch")
        s = _psd_sqrt(ra)
        w = np.linalg.eigvalsh(s @ rb @ s)
        f = np.sum(np.sqrt(np.clip(w, 0, None))) ** 2
    return float(np.clip(f, 0.0, 1.0))
