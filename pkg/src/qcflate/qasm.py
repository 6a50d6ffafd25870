"""Plain-text circuit format.

    qasm2-subset
    qubits 3
    clbits 1
    cx q[0] q[1]
    cu3 q[0] q[2] (1.9106332362490186 3.1415926535897931 3.1415926535897931)
    measure q[2] -> c[0]

Qubit 0 is the least-significant bit of every basis index. Angles are written
with 17 significant digits so a dump/load round trip is exact. Blank lines
and ``#`` comments are ignored on input.
"""

from __future__ import annotations

import re
from pathlib import Path

from .circuit import ARITY, NUM_PARAMS, Circuit, CircuitError, GateKind, Instruction

HEADER = "qasm2-subset"

_QUBIT = re.compile(r"q\[(\d+)\]")
_LINE = re.compile(r"^(?P<name>[a-z0-9]+)(?P<qubits>(?:\s+q\[\d+\])*)\s*(?:\((?P<params>[^)]*)\))?\s*(?:->\s*c\[(?P<clbit>\d+)\])?$")


class QasmError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _fmt(x: float) -> str:
    return format(x, ".17g")


def dumps(circuit: Circuit) -> str:
    lines = [HEADER, f"qubits {circuit.num_qubits}", f"clbits {circuit.num_clbits}"]
    for inst in circuit.instructions:
        parts = [inst.name] + [f"q[{q}]" for q in inst.qubits]
        if inst.params:
            parts.append("(" + " ".join(_fmt(p) for p in inst.params) + ")")
        if inst.name == "measure":
            parts += ["->", f"c[{inst.kind.clbit}]"]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _size(line_no: int, text: str, key: str) -> int:
    m = re.fullmatch(rf"{key}\s+(\d+)", text)
    if not m:
        raise QasmError(line_no, f"expected '{key} N', got {text!r}")
    return int(m.group(1))


def loads(text: str) -> Circuit:
    rows = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((no, line))
    if not rows or rows[0][1] != HEADER:
        raise QasmError(rows[0][0] if rows else 1, f"missing '{HEADER}' header")
    if len(rows) < 3:
        raise QasmError(rows[-1][0], "missing 'qubits' / 'clbits' declarations")
    n = _size(rows[1][0], rows[1][1], "qubits")
    m = _size(rows[2][0], rows[2][1], "clbits")
    insts = []
    for no, line in rows[3:]:
        match = _LINE.match(line)
        if not match:
            raise QasmError(no, f"cannot parse {line!r}")
        name = match["name"]
        if name not in ARITY:
            raise QasmError(no, f"unknown gate {name!r}")
        qubits = [int(q) for q in _QUBIT.findall(match["qubits"] or "")]
        try:
            params = tuple(float(p) for p in (match["params"] or "").split())
        except ValueError:
            raise QasmError(no, f"bad parameter list {match['params']!r}") from None
        if len(params) != NUM_PARAMS.get(name, 0):
            raise QasmError(no, f"{name} takes {NUM_PARAMS.get(name, 0)} parameter(s), got {len(params)}")
        clbit = int(match["clbit"]) if match["clbit"] is not None else None
        if (name == "measure") != (clbit is not None):
            raise QasmError(no, "'-> c[k]' is required for measure and only allowed there")
        if any(q >= n for q in qubits) or (clbit is not None and clbit >= m):
            raise QasmError(no, "operand outside the declared registers")
        try:
            insts.append(Instruction(GateKind(name, params, clbit), tuple(qubits)))
        except CircuitError as exc:
            raise QasmError(no, str(exc)) from None
    return Circuit(n, tuple(insts), m)


def load(path: str | Path) -> Circuit:
    return loads(Path(path).read_text())


def dump(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(dumps(circuit))
