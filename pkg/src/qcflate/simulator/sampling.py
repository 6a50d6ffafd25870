"""Shot sampling with per-qubit readout confusion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import SimulationError


@dataclass(frozen=True)
class ReadoutError:
    p01: float = 0.0  # P(read 0 | prepared 1)
    p10: float = 0.0  # P(read 1 | prepared 0)

    def __post_init__(self):
        if not (0 <= self.p01 <= 1 and 0 <= self.p10 <= 1):
            raise SimulationError("readout probabilities must lie in [0, 1]")

    def confusion(self) -> np.ndarray:
        """``M[measured, prepared]``; columns sum to one."""
        return np.array([[1 - self.p10, self.p01], [self.p10, 1 - self.p01]])


@dataclass(frozen=True)
class ShotResult:
    counts: dict[str, int]
    shots: int
    seed: int | None = None
    num_bits: int = field(default=0)

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise SimulationError("counts do not sum to the number of shots")

    def probability(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots

    def merge(self, other: ShotResult) -> ShotResult:
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        return ShotResult(dict(sorted(counts.items())), self.shots + other.shots, None, max(self.num_bits, other.num_bits))


def _checked(probabilities) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    m = p.size.bit_length() - 1
    if p.size != 2**m:
        raise SimulationError("probability vector length must be a power of two")
    if p.min() < -1e-9:
        raise SimulationError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1) > 1e-9:
        raise SimulationError(f"probabilities sum to {p.sum():.12g}")
    p = np.clip(p, 0, None)
    return p / p.sum()


def apply_readout(probabilities, readout: Sequence[ReadoutError | None] | None) -> np.ndarray:
    """Exact outcome distribution after independent per-bit confusion (bit 0 = LSB)."""
    p = _checked(probabilities)
    m = p.size.bit_length() - 1
    if not readout:
        return p
    if len(readout) != m:
        raise SimulationError(f"{len(readout)} readout models for {m} measured bits")
    tensor = p.reshape((2,) * m)
    for bit, err in enumerate(readout):
        if err is None:
            continue
        axis = m - 1 - bit
        tensor = np.moveaxis(np.tensordot(err.confusion(), tensor, axes=([1], [axis])), 0, axis)
    return tensor.reshape(-1)


def bitstring(index: int, width: int) -> str:
    """Bit ``width - 1`` first, so bit 0 is the rightmost character."""
    return format(index, f"0{width}b") if width else ""


def sample_shots(
    probabilities,
    readout: Sequence[ReadoutError | None] | None = None,
    shots: int = 8192,
    seed: int | None = 0,
) -> ShotResult:
    """Draw ``shots`` outcomes; identical seeds give identical counts."""
    if shots < 1:
        raise SimulationError("shots must be positive")
    p = apply_readout(probabilities, readout)
    m = p.size.bit_length() - 1
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    counts = {bitstring(i, m): int(c) for i, c in enumerate(draws) if c}
    return ShotResult(counts, shots, seed, m)


def marginal(probabilities, bits: Sequence[int]) -> np.ndarray:
    """Distribution of the listed bits; ``bits[0]`` becomes the new bit 0."""
    p = _checked(probabilities)
    m = p.size.bit_length() - 1
    tensor = p.reshape((2,) * m)
    axes = [m - 1 - b for b in bits]
    rest = tuple(a for a in range(m) if a not in axes)
    reduced = tensor.sum(axis=rest) if rest else tensor
    # remaining axes keep ascending order of the original axis numbers
    kept = sorted(axes)
    order = [kept.index(a) for a in reversed(axes)]
    return np.transpose(reduced, order).reshape(-1)
