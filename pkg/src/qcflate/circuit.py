"""Circuit intermediate representation.

A :class:`Circuit` is an immutable, ordered list of :class:`Instruction` over
``num_qubits`` wires. Qubit 0 is the least-significant bit of every
computational-basis index, both for whole-circuit unitaries and for the
per-gate matrices returned by :func:`gate_matrix` (operand 0 is the LSB of the
gate's local index, so ``cx(c, t)`` has control as bit 0 and target as bit 1).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# name -> number of qubit operands (None: variable, barriers only)
ARITY: dict[str, int | None] = {
    "u3": 1,
    "rz": 1,
    "sx": 1,
    "x": 1,
    "h": 1,
    "cx": 2,
    "ch": 2,
    "ccx": 3,
    "cu3": 2,
    "swap": 2,
    "measure": 1,
    "reset": 1,
    "barrier": None,
}
NUM_PARAMS = {"u3": 3, "rz": 1, "cu3": 3}
NON_UNITARY = frozenset({"measure", "reset", "barrier"})
MAX_UNITARY_QUBITS = 12


class CircuitError(ValueError):
    """Raised for malformed circuits or operations that do not apply to them."""


def normalize_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    if t <= -math.pi:
        t += 2 * math.pi
    return t


@dataclass(frozen=True)
class GateKind:
    name: str
    params: tuple[float, ...] = ()
    clbit: int | None = None

    def __post_init__(self):
        if self.name not in ARITY:
            raise CircuitError(f"unknown gate {self.name!r}")
        if len(self.params) != NUM_PARAMS.get(self.name, 0):
            raise CircuitError(f"{self.name} takes {NUM_PARAMS.get(self.name, 0)} parameters, got {len(self.params)}")
        if not all(math.isfinite(p) for p in self.params):
            raise CircuitError(f"non-finite parameter in {self.name}")
        if self.name == "measure" and (self.clbit is None or self.clbit < 0):
            raise CircuitError("measure needs a classical bit index")

    @property
    def arity(self) -> int | None:
        return ARITY[self.name]

    @property
    def is_unitary(self) -> bool:
        return self.name not in NON_UNITARY

    def canonical(self) -> GateKind:
        """Same gate with every angle normalized into (-pi, pi]."""
        if not self.params:
            return self
        return GateKind(self.name, tuple(normalize_angle(p) for p in self.params), self.clbit)

    def __str__(self) -> str:
        if self.params:
            return f"{self.name}({', '.join(f'{p:.6g}' for p in self.params)})"
        return self.name


@dataclass(frozen=True)
class Instruction:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = self.kind.arity
        if arity is not None and len(self.qubits) != arity:
            raise CircuitError(f"{self.kind.name} acts on {arity} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit operand in {self.kind.name}{self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError("negative qubit index")

    @property
    def name(self) -> str:
        return self.kind.name

    @property
    def params(self) -> tuple[float, ...]:
        return self.kind.params

    def on(self, mapping: Sequence[int]) -> Instruction:
        """Relabel operands through ``mapping[old] -> new``."""
        return Instruction(self.kind, tuple(mapping[q] for q in self.qubits))

    def __str__(self) -> str:
        return f"{self.kind} {list(self.qubits)}"


def _make(name: str, qubits: Iterable[int], params: Sequence[float] = (), clbit: int | None = None) -> Instruction:
    return Instruction(GateKind(name, tuple(float(p) for p in params), clbit), tuple(qubits))


def u3(theta: float, phi: float, lam: float, q: int) -> Instruction:
    return _make("u3", (q,), (theta, phi, lam))


def rz(theta: float, q: int) -> Instruction:
    return _make("rz", (q,), (theta,))


def sx(q: int) -> Instruction:
    return _make("sx", (q,))


def x(q: int) -> Instruction:
    return _make("x", (q,))


def h(q: int) -> Instruction:
    return _make("h", (q,))


def cx(control: int, target: int) -> Instruction:
    return _make("cx", (control, target))


def ch(control: int, target: int) -> Instruction:
    return _make("ch", (control, target))


def ccx(c1: int, c2: int, target: int) -> Instruction:
    return _make("ccx", (c1, c2, target))


def cu3(theta: float, phi: float, lam: float, control: int, target: int) -> Instruction:
    return _make("cu3", (control, target), (theta, phi, lam))


def swap(a: int, b: int) -> Instruction:
    return _make("swap", (a, b))


def measure(q: int, clbit: int) -> Instruction:
    return _make("measure", (q,), clbit=clbit)


def reset(q: int) -> Instruction:
    return _make("reset", (q,))


def barrier(*qubits: int) -> Instruction:
    return _make("barrier", qubits)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    instructions: tuple[Instruction, ...] = ()
    num_clbits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitError("negative register size")
        for inst in self.instructions:
            if any(q >= self.num_qubits for q in inst.qubits):
                raise CircuitError(f"{inst} exceeds circuit width {self.num_qubits}")
            if inst.kind.clbit is not None and inst.kind.clbit >= self.num_clbits:
                raise CircuitError(f"{inst} exceeds classical register size {self.num_clbits}")

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def __add__(self, other: Circuit) -> Circuit:
        if other.num_qubits != self.num_qubits:
            raise CircuitError(f"width mismatch: {self.num_qubits} vs {other.num_qubits}")
        return Circuit(self.num_qubits, self.instructions + other.instructions, max(self.num_clbits, other.num_clbits))

    def with_instructions(self, instructions: Iterable[Instruction]) -> Circuit:
        return Circuit(self.num_qubits, tuple(instructions), self.num_clbits)

    def append(self, *instructions: Instruction) -> Circuit:
        return self.with_instructions(self.instructions + instructions)

    @property
    def is_unitary(self) -> bool:
        return all(inst.kind.is_unitary or inst.name == "barrier" for inst in self.instructions)

    def strip(self, *names: str) -> Circuit:
        """Drop every instruction whose name is in ``names``."""
        return self.with_instructions(i for i in self.instructions if i.name not in names)

    def __str__(self) -> str:
        lines = [f"Circuit({self.num_qubits} qubits, {len(self)} instructions)"]
        lines += [f"  {inst}" for inst in self.instructions]
        return "\n".join(lines)


# -- gate matrices ---------------------------------------------------------

_SQ2 = 1 / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def controlled(u: np.ndarray) -> np.ndarray:
    """4x4 controlled-u with the control on operand 0 (the low bit)."""
    m = np.eye(4, dtype=complex)
    # indices with control bit set: 1 (target 0) and 3 (target 1)
    m[np.ix_([1, 3], [1, 3])] = u
    return m


def gate_matrix(kind: GateKind) -> np.ndarray:
    """Exact matrix of a unitary gate, operand 0 as the least-significant bit."""
    name = kind.name
    if name == "u3":
        return u3_matrix(*kind.params)
    if name == "rz":
        return rz_matrix(kind.params[0])
    if name == "sx":
        return _SX.copy()
    if name == "x":
        return _X.copy()
    if name == "h":
        return _H.copy()
    if name == "cx":
        return controlled(_X)
    if name == "ch":
        return controlled(_H)
    if name == "cu3":
        return controlled(u3_matrix(*kind.params))
    if name == "swap":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if name == "ccx":
        m = np.eye(8, dtype=complex)
        # controls are bits 0 and 1, target bit 2: swap |011> and |111>
        m[[3, 7]] = m[[7, 3]]
        return m
    raise CircuitError(f"no matrix for non-unitary gate {name!r}")


def apply_matrix(tensor: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply ``matrix`` to ``qubits`` of a state tensor shaped ``(2,)*n + batch``.

    Qubit ``q`` lives on axis ``n - 1 - q`` (C-order reshape of an LSB-first index).
    """
    k = len(qubits)
    gate = matrix.reshape((2,) * (2 * k))
    # gate axes run from the highest operand to the lowest
    axes = [n - 1 - q for q in reversed(qubits)]
    out = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full ``2**n x 2**n`` unitary; barriers are ignored."""
    n = circuit.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise CircuitError(f"circuit_unitary is limited to {MAX_UNITARY_QUBITS} qubits, got {n}")
    dim = 2**n
    tensor = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for inst in circuit.instructions:
        if inst.name == "barrier":
            continue
        if not inst.kind.is_unitary:
            raise CircuitError(f"circuit contains non-unitary instruction {inst.name}")
        tensor = apply_matrix(tensor, gate_matrix(inst.kind), inst.qubits, n)
    return tensor.reshape(dim, dim)


# -- structural transforms and metrics -------------------------------------


def inverse_instructions(inst: Instruction) -> list[Instruction]:
    """Instructions implementing the inverse of ``inst`` (up to global phase)."""
    name, q = inst.name, inst.qubits
    if name == "rz":
        return [rz(-inst.params[0], q[0])]
    if name in ("u3", "cu3"):
        # U3(t, p, l)^dagger = U3(-t, -l, -p) = U3(t, pi - l, pi - p), exactly
        theta, phi, lam = inst.params
        params = (theta, normalize_angle(math.pi - lam), normalize_angle(math.pi - phi))
        return [u3(*params, q[0]) if name == "u3" else cu3(*params, *q)]
    if name == "sx":
        # SX^dagger = Rz(pi) SX Rz(pi) up to phase; keeps the basis closed
        return [rz(math.pi, q[0]), sx(q[0]), rz(math.pi, q[0])]
    if name in ("x", "h", "cx", "ch", "ccx", "swap", "barrier"):
        return [inst]
    raise CircuitError(f"cannot invert non-unitary instruction {name}")


def adjoint(circuit: Circuit) -> Circuit:
    out: list[Instruction] = []
    for inst in reversed(circuit.instructions):
        out.extend(inverse_instructions(inst))
    return circuit.with_instructions(out)


def depth(circuit: Circuit) -> int:
    """Longest chain of non-barrier instructions; barriers only synchronize."""
    level = [0] * circuit.num_qubits
    for inst in circuit.instructions:
        qs = inst.qubits or tuple(range(circuit.num_qubits))
        top = max((level[q] for q in qs), default=0)
        if inst.name != "barrier":
            top += 1
        for q in qs:
            level[q] = top
    return max(level, default=0)


def gate_counts(circuit: Circuit) -> dict[str, int]:
    counts = Counter(inst.name for inst in circuit.instructions if inst.name != "barrier")
    return dict(sorted(counts.items()))


def count_cx(circuit: Circuit) -> int:
    return sum(1 for inst in circuit.instructions if inst.name == "cx")


# -- hardware model --------------------------------------------------------


@dataclass(frozen=True)
class CouplingMap:
    num_qubits: int
    edges: frozenset[frozenset[int]] = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2 or any(not 0 <= q < self.num_qubits for q in e):
                raise CircuitError(f"bad coupling edge {sorted(e)}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, num_qubits: int, pairs: Iterable[tuple[int, int]]) -> CouplingMap:
        return cls(num_qubits, frozenset(frozenset(p) for p in pairs))

    def has_edge(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def neighbors(self, q: int) -> list[int]:
        return sorted(next(iter(e - {q})) for e in self.edges if q in e)

    def distances(self) -> np.ndarray:
        """All-pairs hop distance (inf where disconnected)."""
        n = self.num_qubits
        dist = np.full((n, n), np.inf)
        for src in range(n):
            dist[src, src] = 0
            frontier = [src]
            while frontier:
                nxt = []
                for a in frontier:
                    for b in self.neighbors(a):
                        if dist[src, b] == np.inf:
                            dist[src, b] = dist[src, a] + 1
                            nxt.append(b)
                frontier = nxt
        return dist

    def is_connected(self) -> bool:
        return self.num_qubits <= 1 or bool(np.isfinite(self.distances()).all())

    def is_complete(self) -> bool:
        n = self.num_qubits
        return len(self.edges) == n * (n - 1) // 2


TRIANGLE3 = CouplingMap.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
LINE3 = CouplingMap.from_pairs(3, [(0, 1), (1, 2)])
PRESETS = {"triangle": TRIANGLE3, "line": LINE3}


@dataclass(frozen=True)
class BasisGateSet:
    names: frozenset[str] = frozenset({"rz", "sx", "cx", "measure", "reset", "barrier"})

    def __contains__(self, kind: GateKind | str) -> bool:
        name = kind if isinstance(kind, str) else kind.name
        return name in self.names


DEFAULT_BASIS = BasisGateSet()


@dataclass(frozen=True)
class Violation:
    index: int
    kind: str  # "basis" or "connectivity"
    message: str


def validate(circuit: Circuit, coupling: CouplingMap, basis: BasisGateSet = DEFAULT_BASIS) -> list[Violation]:
    """Every basis and connectivity violation in ``circuit``; empty means valid."""
    out = []
    for i, inst in enumerate(circuit.instructions):
        if inst.kind not in basis:
            out.append(Violation(i, "basis", f"{inst.name} is not a basis gate"))
        if inst.name != "barrier" and len(inst.qubits) >= 2:
            pairs = [(a, b) for j, a in enumerate(inst.qubits) for b in inst.qubits[j + 1 :]]
            for a, b in pairs:
                if not coupling.has_edge(a, b):
                    out.append(Violation(i, "connectivity", f"{inst.name} on ({a}, {b}) has no coupling edge"))
    return out
