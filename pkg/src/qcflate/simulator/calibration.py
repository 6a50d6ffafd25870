"""Device calibration data: per-qubit coherence and readout, per-gate error and timing.

Times follow the usual device conventions: T1/T2 in microseconds, gate
durations in nanoseconds.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import jsonschema

from ..circuit import CouplingMap


class CalibrationError(ValueError):
    pass


_PROB = {"type": "number", "minimum": 0, "maximum": 1}
_NONNEG = {"type": "number", "minimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["backend", "qubits", "gates_1q", "cnot"],
    "properties": {
        "backend": {"type": "string"},
        "qubits": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["t1_us", "t2_us", "readout_p01", "readout_p10"],
                "properties": {
                    "t1_us": {"type": "number", "exclusiveMinimum": 0},
                    "t2_us": {"type": "number", "exclusiveMinimum": 0},
                    "readout_p01": _PROB,
                    "readout_p10": _PROB,
                },
            },
        },
        "gates_1q": {
            "type": "object",
            "additionalProperties": False,
            "required": ["duration_ns", "depolarizing"],
            "properties": {"duration_ns": _NONNEG, "depolarizing": _PROB},
        },
        "cnot": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["edge", "duration_ns", "depolarizing"],
                "properties": {
                    "edge": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
                    "duration_ns": _NONNEG,
                    "depolarizing": _PROB,
                },
            },
        },
        "reset_error": _PROB,
    },
}


@dataclass(frozen=True)
class QubitCalibration:
    t1_us: float
    t2_us: float
    readout_p01: float  # P(read 0 | prepared 1)
    readout_p10: float  # P(read 1 | prepared 0)


@dataclass(frozen=True)
class GateCalibration:
    duration_ns: float
    depolarizing: float


@dataclass(frozen=True)
class CalibrationData:
    backend: str
    qubits: tuple[QubitCalibration, ...]
    gates_1q: GateCalibration
    cnot: dict[frozenset[int], GateCalibration] = field(default_factory=dict)
    reset_error: float = 0.0

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def qubit(self, q: int) -> QubitCalibration:
        if not 0 <= q < len(self.qubits):
            raise CalibrationError(f"no calibration for qubit {q}")
        return self.qubits[q]

    def cnot_gate(self, a: int, b: int) -> GateCalibration:
        try:
            return self.cnot[frozenset((a, b))]
        except KeyError:
            raise CalibrationError(f"no CNOT calibration for edge ({a}, {b})") from None

    def cnot_error(self, a: int, b: int) -> float:
        return self.cnot_gate(a, b).depolarizing

    def coupling_map(self) -> CouplingMap:
        return CouplingMap(self.num_qubits, frozenset(self.cnot))

    def check_coupling(self, cm: CouplingMap) -> list[str]:
        """Problems that prevent using this calibration with ``cm``."""
        problems = []
        if cm.num_qubits > self.num_qubits:
            problems.append(f"coupling map has {cm.num_qubits} qubits, calibration covers {self.num_qubits}")
        for a, b in cm.sorted_edges():
            if frozenset((a, b)) not in self.cnot:
                problems.append(f"missing CNOT calibration for edge ({a}, {b})")
        return problems

    def scaled(self, factor: float) -> CalibrationData:
        """Copy with every depolarizing probability multiplied by ``factor`` (capped at 1)."""

        def sc(g: GateCalibration) -> GateCalibration:
            return replace(g, depolarizing=min(1.0, g.depolarizing * factor))

        return replace(self, gates_1q=sc(self.gates_1q), cnot={e: sc(g) for e, g in self.cnot.items()})

    def to_dict(self) -> dict:
        out = {
            "backend": self.backend,
            "qubits": [vars(q).copy() for q in self.qubits],
            "gates_1q": vars(self.gates_1q).copy(),
            "cnot": [
                {"edge": sorted(e), **vars(g)} for e, g in sorted(self.cnot.items(), key=lambda kv: sorted(kv[0]))
            ],
        }
        if self.reset_error:
            out["reset_error"] = self.reset_error
        return out

    @classmethod
    def from_dict(cls, data: dict) -> CalibrationData:
        problems = validate_calibration_dict(data)
        if problems:
            raise CalibrationError("; ".join(problems))
        return _build(data)

    @classmethod
    def load(cls, path: str | Path) -> CalibrationData:
        text = Path(path).read_text()
        problems = validate_calibration_text(text)
        if problems:
            raise CalibrationError(f"{path}: " + "; ".join(problems))
        return _build(json.loads(text))


def _build(data: dict) -> CalibrationData:
    return CalibrationData(
        backend=data["backend"],
        qubits=tuple(QubitCalibration(**q) for q in data["qubits"]),
        gates_1q=GateCalibration(**data["gates_1q"]),
        cnot={frozenset(c["edge"]): GateCalibration(c["duration_ns"], c["depolarizing"]) for c in data["cnot"]},
        reset_error=data.get("reset_error", 0.0),
    )


def _path_str(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def validate_calibration_dict(data) -> list[str]:
    return [f"{_path_str(p)}: {msg}" for p, msg in _problems(data)]


def _problems(data) -> list[tuple[list, str]]:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    out = [(list(e.absolute_path), e.message) for e in errors]
    if out:
        return out
    n = len(data["qubits"])
    for i, q in enumerate(data["qubits"]):
        if q["t2_us"] > 2 * q["t1_us"]:
            out.append((["qubits", i, "t2_us"], f"T2 = {q['t2_us']} exceeds 2*T1 = {2 * q['t1_us']}"))
    seen = set()
    for i, c in enumerate(data["cnot"]):
        a, b = c["edge"]
        if a == b or a >= n or b >= n:
            out.append((["cnot", i, "edge"], f"edge {c['edge']} is not a pair of calibrated qubits"))
        e = frozenset((a, b))
        if e in seen:
            out.append((["cnot", i, "edge"], f"duplicate entry for edge {sorted(e)}"))
        seen.add(e)
    return out


def _locate(text: str, path: list) -> int | None:
    """Best-effort line number of ``path`` inside the JSON source ``text``."""
    pos = 0
    for k, step in enumerate(path):
        if isinstance(step, int):
            nxt = next((p for p in path[k + 1 :] if isinstance(p, str)), None)
            pattern = re.escape(json.dumps(nxt)) if nxt else r"\{"
            matches = list(re.finditer(pattern, text[pos:]))
            if len(matches) <= step:
                return None
            pos += matches[step].start()
            if nxt:
                break
        else:
            m = re.search(re.escape(json.dumps(step)), text[pos:])
            if m is None:
                return None
            pos += m.start()
    return text.count("\n", 0, pos) + 1


def validate_calibration_text(text: str) -> list[str]:
    """Diagnostics for a calibration JSON document, prefixed by source line when known."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return [f"line {exc.lineno}: invalid JSON: {exc.msg}"]
    out = []
    for path, msg in _problems(data):
        line = _locate(text, path)
        prefix = f"line {line}: " if line else ""
        out.append(f"{prefix}{_path_str(path)}: {msg}")
    return out


SHIPPED = {"bogota_like": "bogota_like.json", "yorktown_like": "yorktown_like.json"}
BACKEND_CALIBRATION = {"line": "bogota_like", "triangle": "yorktown_like"}


def shipped_calibration_path(name: str) -> Path:
    key = name.replace("-", "_")
    if key not in SHIPPED:
        raise CalibrationError(f"unknown shipped calibration {name!r}; choose from {sorted(SHIPPED)}")
    return Path(str(resources.files("qcflate") / "data" / SHIPPED[key]))


def load_calibration(name_or_path: str | Path) -> CalibrationData:
    """Load a shipped calibration by name (``bogota_like``) or a JSON file by path."""
    key = str(name_or_path).replace("-", "_")
    if key in SHIPPED:
        return CalibrationData.load(shipped_calibration_path(key))
    return CalibrationData.load(name_or_path)

