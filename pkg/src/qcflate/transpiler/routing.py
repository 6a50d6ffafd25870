"""Layout selection and SWAP insertion onto a coupling map."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..circuit import Circuit, CircuitError, CouplingMap, Instruction, cx

EXHAUSTIVE_LAYOUT_LIMIT = 4


@dataclass(frozen=True)
class LayoutPermutation:
    """``initial[l]`` / ``final[l]``: physical qubit holding logical ``l`` before / after the circuit."""

    initial: tuple[int, ...]
    final: tuple[int, ...]

    def __post_init__(self):
        for name in ("initial", "final"):
            m = tuple(int(p) for p in getattr(self, name))
            if sorted(m) != list(range(len(m))):
                raise CircuitError(f"{name} layout {m} is not a permutation")
            object.__setattr__(self, name, m)
        if len(self.initial) != len(self.final):
            raise CircuitError("initial and final layouts differ in size")

    @classmethod
    def identity(cls, n: int) -> LayoutPermutation:
        return cls(tuple(range(n)), tuple(range(n)))

    def then(self, nxt: LayoutPermutation) -> LayoutPermutation:
        """Compose with a later stage whose logical qubits are this stage's physical ones."""
        return LayoutPermutation(
            tuple(nxt.initial[p] for p in self.initial),
            tuple(nxt.final[p] for p in self.final),
        )

    def to_dict(self) -> dict:
        return {"initial": list(self.initial), "final": list(self.final)}


def permutation_matrix(layout: Sequence[int]) -> np.ndarray:
    """Unitary sending logical basis states to physical ones (qubit ``l`` -> ``layout[l]``)."""
    n = len(layout)
    dim = 2**n
    m = np.zeros((dim, dim))
    for x in range(dim):
        y = 0
        for l, p in enumerate(layout):
            if x >> l & 1:
                y |= 1 << p
        m[y, x] = 1
    return m


@dataclass
class _Routed:
    instructions: list[Instruction]
    swaps: int
    final: tuple[int, ...]


def _route_with_layout(circuit: Circuit, cm: CouplingMap, dist: np.ndarray, layout: Sequence[int], rng: random.Random) -> _Routed:
    l2p = list(layout)
    p2l = {p: l for l, p in enumerate(l2p)}
    out: list[Instruction] = []
    swaps = 0
    for inst in circuit.instructions:
        if inst.name != "barrier" and len(inst.qubits) == 2:
            a, b = inst.qubits
            while dist[l2p[a], l2p[b]] > 1:
                pa, pb = l2p[a], l2p[b]
                current = dist[pa, pb]
                options = []
                for moving, other in ((pa, pb), (pb, pa)):
                    for nb in cm.neighbors(moving):
                        if dist[nb, other] < current:
                            options.append((moving, nb))
                moving, nb = rng.choice(sorted(options))
                first, second = (moving, nb) if rng.random() < 0.5 else (nb, moving)
                out += [cx(first, second), cx(second, first), cx(first, second)]
                swaps += 1
                la, lb = p2l.get(moving), p2l.get(nb)
                p2l[moving], p2l[nb] = lb, la
                if la is not None:
                    l2p[la] = nb
                if lb is not None:
                    l2p[lb] = moving
        elif len(inst.qubits) > 2 and inst.name != "barrier":
            raise CircuitError(f"route expects at most two-qubit gates, got {inst.name}")
        out.append(inst.on(l2p))
    return _Routed(out, swaps, tuple(l2p))


def candidate_layouts(n_logical: int, cm: CouplingMap, rng: random.Random, samples: int = 64) -> list[tuple[int, ...]]:
    n_phys = cm.num_qubits
    if n_phys <= EXHAUSTIVE_LAYOUT_LIMIT:
        return list(itertools.permutations(range(n_phys), n_phys))
    out = {tuple(range(n_phys))}
    while len(out) < samples:
        perm = list(range(n_phys))
        rng.shuffle(perm)
        out.add(tuple(perm))
    return sorted(out)


def route(
    circuit: Circuit,
    cm: CouplingMap,
    seed: int = 0,
    initial_layout: Sequence[int] | None = None,
    edge_error: Callable[[int, int], float] | None = None,
) -> tuple[Circuit, LayoutPermutation]:
    """Map ``circuit`` onto ``cm``, inserting SWAPs as three CX each.

    Every candidate initial layout is routed greedily with seeded tie-breaks;
    the winner has the fewest SWAPs, then (if ``edge_error`` is given) the lowest
    summed CX error, then a seeded random draw.
    """
    if circuit.num_qubits > cm.num_qubits:
        raise CircuitError(f"circuit needs {circuit.num_qubits} qubits, coupling map has {cm.num_qubits}")
    if not cm.is_connected():
        raise CircuitError("coupling map is disconnected")
    wide = Circuit(cm.num_qubits, circuit.instructions, circuit.num_clbits)
    rng = random.Random(seed)
    dist = cm.distances()
    layouts = [tuple(initial_layout)] if initial_layout is not None else candidate_layouts(circuit.num_qubits, cm, rng)
    best_key, best = None, None
    for layout in layouts:
        routed = _route_with_layout(wide, cm, dist, layout, rng)
        err = 0.0
        if edge_error is not None:
            err = sum(edge_error(*i.qubits) for i in routed.instructions if i.name == "cx")
        key = (routed.swaps, round(err, 12), rng.random())
        if best_key is None or key < best_key:
            best_key, best = key, (layout, routed)
    layout, routed = best
    return wide.with_instructions(routed.instructions), LayoutPermutation(layout, routed.final)
