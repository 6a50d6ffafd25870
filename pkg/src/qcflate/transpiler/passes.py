"""Circuit-to-circuit passes over the {Rz, SX, CX} basis.

Every pass returns a new circuit that equals its input up to global phase.
"""

from __future__ import annotations

import math

import numpy as np

from ..circuit import (
    Circuit,
    CircuitError,
    Instruction,
    apply_matrix,
    count_cx,
    cx,
    gate_matrix,
    normalize_angle,
    rz,
    u3_matrix,
)
from .kak import kak_decompose
from .synthesis import (
    controlled_u_instructions,
    decompose_u3_to_basis,
    toffoli_instructions,
    unitary_to_basis,
)

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_BARRIERS = frozenset({"measure", "reset", "barrier"})


def lower_instruction(inst: Instruction) -> list[Instruction]:
    name, q = inst.name, inst.qubits
    if name in ("rz", "sx", "cx", "measure", "reset", "barrier"):
        return [inst]
    if name == "u3":
        return decompose_u3_to_basis(*inst.params, qubit=q[0])
    if name in ("x", "h"):
        return unitary_to_basis(gate_matrix(inst.kind), q[0])
    if name == "ch":
        return controlled_u_instructions(_H, *q)
    if name == "cu3":
        return controlled_u_instructions(u3_matrix(*inst.params), *q)
    if name == "ccx":
        return toffoli_instructions(*q)
    if name == "swap":
        a, b = q
        return [cx(a, b), cx(b, a), cx(a, b)]
    raise CircuitError(f"cannot lower {name}")


def lower_to_basis(circuit: Circuit) -> Circuit:
    out: list[Instruction] = []
    for inst in circuit.instructions:
        out.extend(lower_instruction(inst))
    return circuit.with_instructions(out)


def _is_1q_unitary(inst: Instruction) -> bool:
    return len(inst.qubits) == 1 and inst.kind.is_unitary


def _run_matrix(run: list[Instruction]) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for inst in run:
        m = gate_matrix(inst.kind) @ m
    return m


def _resynth(run: list[Instruction]) -> list[Instruction]:
    """Shortest of the original run and its Euler re-synthesis (ties favor fewer SX)."""
    if not run:
        return run
    if len(run) == 1 and run[0].name == "rz" and abs(normalize_angle(run[0].params[0])) < 1e-12:
        return []
    new = unitary_to_basis(_run_matrix(run), run[0].qubits[0])

    def cost(r):
        return (len(r), sum(i.name == "sx" for i in r))

    return new if cost(new) < cost(run) else run


def merge_1q_runs(circuit: Circuit) -> Circuit:
    """Collapse each maximal run of one-qubit gates on a wire."""
    pending: dict[int, list[Instruction]] = {}
    out: list[Instruction] = []
    for inst in circuit.instructions:
        if _is_1q_unitary(inst):
            pending.setdefault(inst.qubits[0], []).append(inst)
            continue
        for q in inst.qubits or range(circuit.num_qubits):
            out.extend(_resynth(pending.pop(q, [])))
        out.append(inst)
    for q in sorted(pending):
        out.extend(_resynth(pending[q]))
    return circuit.with_instructions(out)


def _next_on_wires(insts: list[Instruction | None], start: int, wires: tuple[int, ...], n: int) -> int | None:
    """Index of the next live instruction after ``start`` sharing a wire with ``wires``."""
    for j in range(start + 1, len(insts)):
        inst = insts[j]
        if inst is None:
            continue
        qs = inst.qubits or tuple(range(n))
        if set(qs) & set(wires):
            return j
    return None


def cancel_cnot_pairs(circuit: Circuit) -> Circuit:
    """Remove CX pairs that are adjacent on both of their wires."""
    insts: list[Instruction | None] = list(circuit.instructions)
    changed = True
    while changed:
        changed = False
        for i, inst in enumerate(insts):
            if inst is None or inst.name != "cx":
                continue
            j = _next_on_wires(insts, i, inst.qubits, circuit.num_qubits)
            if j is not None and insts[j] == inst:
                insts[i] = insts[j] = None
                changed = True
    return circuit.with_instructions(i for i in insts if i is not None)


def _commutes_with_cx(inst: Instruction, control: int, target: int) -> bool:
    """Whether ``inst`` commutes with CX(control, target) by the structural rules."""
    name, qs = inst.name, inst.qubits
    if name == "rz":
        return qs[0] == control or qs[0] not in (control, target)
    if name == "sx":
        return qs[0] == target or qs[0] not in (control, target)
    if name == "cx":
        c, t = qs
        return not (c == target or t == control)
    return not (set(qs or ()) & {control, target}) and name != "barrier"


def _cancel_commuting_cx(insts: list[Instruction | None], n: int) -> bool:
    changed = False
    for i, inst in enumerate(insts):
        if inst is None or inst.name != "cx":
            continue
        c, t = inst.qubits
        for j in range(i + 1, len(insts)):
            other = insts[j]
            if other is None:
                continue
            if other == inst:
                insts[i] = insts[j] = None
                changed = True
                break
            if not set(other.qubits or range(n)) & {c, t}:
                continue
            if not _commutes_with_cx(other, c, t):
                break
    return changed


def _merge_commuting_rz(insts: list[Instruction | None], n: int) -> bool:
    """Fold each Rz into the next Rz on its wire when only CX controls sit between."""
    changed = False
    for i, inst in enumerate(insts):
        if inst is None or inst.name != "rz":
            continue
        q = inst.qubits[0]
        for j in range(i + 1, len(insts)):
            other = insts[j]
            if other is None or q not in (other.qubits or range(n)):
                continue
            if other.name == "rz":
                angle = normalize_angle(inst.params[0] + other.params[0])
                insts[i] = None
                insts[j] = rz(angle, q) if abs(angle) > 1e-12 else None
                changed = True
            elif other.name == "cx" and other.qubits[0] == q:
                continue
            break
    return changed


def commute_cancel(circuit: Circuit) -> Circuit:
    """Commutation-aware cancellation run to a fixed point.

    Rz gates slide through CX controls and merge; SX gates slide through CX
    targets; CX pairs separated only by gates that commute with them cancel.
    """
    insts: list[Instruction | None] = list(circuit.instructions)
    n = circuit.num_qubits
    while _merge_commuting_rz(insts, n) | _cancel_commuting_cx(insts, n):
        pass
    return circuit.with_instructions(i for i in insts if i is not None)


# -- two-qubit block consolidation ----------------------------------------


def collect_2q_blocks(circuit: Circuit) -> list[list[int]]:
    """Maximal two-qubit blocks as lists of instruction indices.

    Wire-greedy: a block on {a, b} grows with CX on that pair and 1q gates on
    either wire, absorbs 1q gates waiting on its wires when opened, and closes
    as soon as any other instruction touches a or b.
    """
    n = circuit.num_qubits
    open_block: dict[int, list[int]] = {}  # qubit -> member list (shared by both wires)
    waiting: dict[int, list[int]] = {}
    blocks: list[list[int]] = []

    def close(q):
        block = open_block.pop(q, None)
        if block is not None:
            for other in [k for k, v in open_block.items() if v is block]:
                del open_block[other]

    for idx, inst in enumerate(circuit.instructions):
        if _is_1q_unitary(inst):
            q = inst.qubits[0]
            if q in open_block:
                open_block[q].append(idx)
            else:
                waiting.setdefault(q, []).append(idx)
            continue
        if inst.name == "cx":
            a, b = inst.qubits
            block = open_block.get(a)
            if block is not None and open_block.get(b) is block:
                block.append(idx)
                continue
            close(a)
            close(b)
            members = sorted(waiting.pop(a, []) + waiting.pop(b, [])) + [idx]
            blocks.append(members)
            open_block[a] = open_block[b] = members
            continue
        for q in inst.qubits or range(n):
            close(q)
            waiting.pop(q, None)
    return blocks


def _block_unitary(circuit: Circuit, members: list[int], pair: tuple[int, int]) -> np.ndarray:
    local = {pair[0]: 0, pair[1]: 1}
    tensor = np.eye(4, dtype=complex).reshape(2, 2, 4)
    for idx in members:
        inst = circuit.instructions[idx]
        tensor = apply_matrix(tensor, gate_matrix(inst.kind), [local[q] for q in inst.qubits], 2)
    return tensor.reshape(4, 4)


def consolidate_blocks(circuit: Circuit) -> Circuit:
    """Resynthesize each 2q block with KAK when that lowers its CX count."""
    replacement: dict[int, list[Instruction]] = {}
    dropped: set[int] = set()
    for members in collect_2q_blocks(circuit):
        insts = [circuit.instructions[i] for i in members]
        old_cx = sum(i.name == "cx" for i in insts)
        if old_cx < 2:
            continue
        pair = tuple(sorted({q for i in insts for q in i.qubits}))
        new = kak_decompose(_block_unitary(circuit, members, pair))
        if count_cx(new) >= old_cx:
            continue
        mapped = [i.on(pair) for i in new.instructions]
        dropped.update(members)
        replacement[members[-1]] = mapped
    out: list[Instruction] = []
    for idx, inst in enumerate(circuit.instructions):
        if idx in replacement:
            out.extend(replacement[idx])
        elif idx not in dropped:
            out.append(inst)
    return circuit.with_instructions(out)


def _signature(c: Circuit) -> tuple:
    return (count_cx(c), len(c), c.instructions)


def optimize(circuit: Circuit, level: int, max_rounds: int = 20) -> Circuit:
    """Run the optimization passes for ``level`` until nothing changes."""
    if level <= 0:
        return circuit
    for _ in range(max_rounds):
        before = circuit
        if level >= 3:
            circuit = consolidate_blocks(circuit)
        circuit = merge_1q_runs(circuit)
        circuit = cancel_cnot_pairs(circuit)
        if level >= 2:
            circuit = commute_cancel(circuit)
            circuit = merge_1q_runs(circuit)
        if circuit.instructions == before.instructions:
            break
    return circuit
