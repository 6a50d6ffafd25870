"""Transpilation entry points: optimization levels, trial harness, segment pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ..circuit import (
    DEFAULT_BASIS,
    PRESETS,
    TRIANGLE3,
    BasisGateSet,
    Circuit,
    CircuitError,
    CouplingMap,
    circuit_unitary,
    gate_matrix,
    count_cx,
    depth,
    gate_counts,
    validate,
)
from ..simulator.calibration import CalibrationData
from ..simulator.channels import reset_channel
from ..simulator.density import apply_channel, apply_operator
from .passes import lower_to_basis, optimize
from .routing import LayoutPermutation, permutation_matrix, route

FIDELITY_FLOOR = 1 - 1e-9


@dataclass(frozen=True)
class PassConfig:
    optimization_level: int = 1
    seed: int = 0
    max_trials: int = 1
    basis: BasisGateSet = DEFAULT_BASIS
    coupling: CouplingMap = TRIANGLE3
    initial_layout: tuple[int, ...] | None = None
    calibration: CalibrationData | None = None

    def __post_init__(self):
        if self.optimization_level not in (0, 1, 2, 3):
            raise CircuitError(f"optimization level must be 0..3, got {self.optimization_level}")
        if self.max_trials < 1:
            raise CircuitError("max_trials must be at least 1")
        if self.initial_layout is not None:
            object.__setattr__(self, "initial_layout", tuple(self.initial_layout))

    def to_dict(self) -> dict:
        preset = next((k for k, v in PRESETS.items() if v == self.coupling), None)
        return {
            "optimization_level": self.optimization_level,
            "seed": self.seed,
            "max_trials": self.max_trials,
            "basis": sorted(self.basis.names),
            "coupling": preset or [list(e) for e in self.coupling.sorted_edges()],
            "initial_layout": list(self.initial_layout) if self.initial_layout is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict, calibration: CalibrationData | None = None) -> PassConfig:
        known = {"optimization_level", "seed", "max_trials", "basis", "coupling", "initial_layout", "num_qubits"}
        unknown = set(data) - known
        if unknown:
            raise CircuitError(f"unknown PassConfig fields: {sorted(unknown)}")
        coupling = data.get("coupling", "triangle")
        if isinstance(coupling, str):
            if coupling not in PRESETS:
                raise CircuitError(f"unknown coupling preset {coupling!r}")
            cm = PRESETS[coupling]
        else:
            pairs = [tuple(p) for p in coupling]
            n = data.get("num_qubits") or 1 + max(max(p) for p in pairs)
            cm = CouplingMap.from_pairs(n, pairs)
        kwargs = {k: data[k] for k in ("optimization_level", "seed", "max_trials", "initial_layout") if data.get(k) is not None}
        if "basis" in data:
            kwargs["basis"] = BasisGateSet(frozenset(data["basis"]))
        return cls(coupling=cm, calibration=calibration, **kwargs)

    @classmethod
    def from_json(cls, text: str, calibration: CalibrationData | None = None) -> PassConfig:
        return cls.from_dict(json.loads(text), calibration)


@dataclass
class TranspileReport:
    counts: dict[str, int]
    depth: int
    layout: LayoutPermutation
    seed: int
    semantic_fidelity: float | None = None
    trials_run: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def cx(self) -> int:
        return self.counts.get("cx", 0)

    def to_dict(self) -> dict:
        out = {
            "counts": dict(self.counts),
            "depth": self.depth,
            "layout": self.layout.to_dict(),
            "seed": self.seed,
            "semantic_fidelity": self.semantic_fidelity,
            "trials_run": self.trials_run,
        }
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# -- semantic certificate ---------------------------------------------------


def _measure_map(c: Circuit) -> dict[int, int]:
    return {i.kind.clbit: i.qubits[0] for i in c.instructions if i.name == "measure"}


def _pad(c: Circuit, n: int) -> Circuit:
    return c if c.num_qubits == n else Circuit(n, c.instructions, c.num_clbits)


def _superoperator(c: Circuit) -> np.ndarray:
    """Column-stacked superoperator of a circuit without measurements."""
    n = c.num_qubits
    dim = 2**n
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for i in range(dim):
            rho = np.zeros((dim, dim), dtype=complex)
            rho[i, j] = 1
            for inst in c.instructions:
                if inst.name == "barrier":
                    continue
                if inst.name == "reset":
                    rho = apply_channel(rho, reset_channel(), inst.qubits, n)
                else:
                    rho = apply_operator(rho, gate_matrix(inst.kind), inst.qubits, n)
            out[:, j * dim + i] = rho.reshape(-1, order="F")
    return out


def semantic_fidelity(source: Circuit, output: Circuit, layout: LayoutPermutation) -> float:
    """How well ``output`` realizes ``source`` given the routing permutation.

    Unitary circuits: ``|tr(U^dagger P_F^dagger V P_L)| / 2^n``. Circuits with
    resets compare superoperators (cosine similarity, square-rooted so a
    unitary pair gives the same number). Measurements must land on the same
    classical bits from the permuted qubits; otherwise the fidelity is 0.
    """
    n = output.num_qubits
    if n > 4:
        return float("nan")
    src = _pad(source, n)
    src_meas, out_meas = _measure_map(src), _measure_map(output)
    if set(src_meas) != set(out_meas) or any(out_meas[k] != layout.final[q] for k, q in src_meas.items()):
        return 0.0
    src, output = src.strip("measure"), output.strip("measure")
    pl, pf = permutation_matrix(layout.initial), permutation_matrix(layout.final)
    if src.is_unitary and output.is_unitary and not any(i.name == "reset" for i in src.instructions + output.instructions):
        u = circuit_unitary(src)
        v = pf.T @ circuit_unitary(output) @ pl
        return float(abs(np.trace(u.conj().T @ v)) / 2**n)
    s_src = _superoperator(src)
    s_out = np.kron(pf, pf).T @ _superoperator(output) @ np.kron(pl, pl)
    cos = abs(np.vdot(s_src, s_out)) / (np.linalg.norm(s_src) * np.linalg.norm(s_out))
    return float(np.sqrt(min(1.0, cos)))


# -- transpilation ---------------------------------------------------------


def _run(circuit: Circuit, cfg: PassConfig) -> tuple[Circuit, LayoutPermutation]:
    level = cfg.optimization_level
    c = optimize(lower_to_basis(circuit), level)
    edge_error = None
    if cfg.calibration is not None and level >= 2:
        edge_error = cfg.calibration.cnot_error
    routed, layout = route(c, cfg.coupling, cfg.seed, cfg.initial_layout, edge_error)
    routed = optimize(routed, level)
    problems = validate(routed, cfg.coupling, cfg.basis)
    if problems:
        raise CircuitError(f"transpiled circuit is invalid: {problems[0].message}")
    return routed, layout


def _report(source: Circuit, out: Circuit, layout: LayoutPermutation, seed: int, trials: int, certify: bool) -> TranspileReport:
    fid = semantic_fidelity(source, out, layout) if certify else None
    return TranspileReport(gate_counts(out), depth(out), layout, seed, fid, trials)


def transpile(circuit: Circuit, cfg: PassConfig, certify: bool = True) -> tuple[Circuit, TranspileReport]:
    """Lower, route and optimize one circuit at ``cfg.optimization_level``.

    0: lower + route. 1: + 1q-run merging and CX-pair cancellation.
    2: + commutation cancellation and calibration-aware layout.
    3: + KAK resynthesis of two-qubit blocks.
    """
    out, layout = _run(circuit, cfg)
    return out, _report(circuit, out, layout, cfg.seed, 1, certify)


def transpile_cascade(circuit: Circuit, cfg: PassConfig, levels: Sequence[int] = (3, 2, 1), certify: bool = True) -> tuple[Circuit, TranspileReport]:
    """Transpile at ``levels[0]``, then re-run the output at each later level in place."""
    out, layout = _run(circuit, replace(cfg, optimization_level=levels[0]))
    identity = tuple(range(cfg.coupling.num_qubits))
    for level in levels[1:]:
        out, step = _run(out, replace(cfg, optimization_level=level, initial_layout=identity))
        layout = layout.then(step)
    return out, _report(circuit, out, layout, cfg.seed, 1, certify)


def selection_key(c: Circuit) -> tuple[int, int, int]:
    return (count_cx(c), depth(c), sum(1 for i in c.instructions if i.name != "barrier"))


def best_of_trials(
    circuit: Circuit,
    cfg: PassConfig,
    runner: Callable[..., tuple[Circuit, TranspileReport]] = transpile,
) -> tuple[Circuit, TranspileReport]:
    """Run ``runner`` with seeds ``seed .. seed + max_trials - 1`` and keep the best.

    Ranking is (CX count, depth, total gates, trial order).
    """
    best = None
    history = []
    for k in range(cfg.max_trials):
        out, rep = runner(circuit, replace(cfg, seed=cfg.seed + k, max_trials=1), certify=False)
        key = selection_key(out) + (k,)
        history.append(rep.cx)
        if best is None or key < best[0]:
            best = (key, out, rep)
    _, out, rep = best
    final = _report(circuit, out, rep.layout, rep.seed, cfg.max_trials, True)
    final.extra["trial_cx_counts"] = history
    return out, final


def efficient_pipeline(
    segments: Sequence[Circuit],
    cfgs: Sequence[PassConfig],
    final_levels: Sequence[int] = (),
    final_cfg: PassConfig | None = None,
    certify: bool = True,
) -> tuple[Circuit, TranspileReport]:
    """Transpile each segment with its own config, join, then re-transpile.

    Each segment starts from the layout the previous one ended in, so the
    joined physical circuit is consistent. The joined circuit is then passed
    through ``final_levels`` in order without re-layout.
    """
    if len(segments) != len(cfgs) or not segments:
        raise CircuitError("need one config per segment")
    width = segments[0].num_qubits
    if any(s.num_qubits != width for s in segments):
        raise CircuitError("segments differ in width")
    parts, layout = [], None
    for seg, cfg in zip(segments, cfgs):
        if layout is not None:
            cfg = replace(cfg, initial_layout=layout.final)
        out, step = _run(seg, cfg)
        layout = step if layout is None else LayoutPermutation(layout.initial, step.final)
        parts.append(out)
    joined = parts[0]
    for p in parts[1:]:
        joined = joined + p
    base = final_cfg or cfgs[-1]
    identity = tuple(range(joined.num_qubits))
    for level in final_levels:
        joined, step = _run(joined, replace(base, optimization_level=level, initial_layout=identity))
        layout = layout.then(step)
    source = segments[0]
    for s in segments[1:]:
        source = source + s
    seed = cfgs[0].seed
    return joined, _report(source, joined, layout, seed, 1, certify)

