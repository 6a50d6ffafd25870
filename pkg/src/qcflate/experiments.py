"""Transpile strategies and simulated fidelity runs for the compression experiments."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np

from .circuit import PRESETS, Circuit, CircuitError, Instruction, controlled, depth, gate_counts, u3_matrix
from .compression import (
    CompressionAngles,
    InputStateLabel,
    build_compdecomp_experiment,
    build_compression_circuit,
    build_compression_experiment,
    compression_angles,
    ideal_compressed_state,
)
from .simulator.calibration import CalibrationData, CalibrationError
from .simulator.density import NoiseModel, measured_qubits, run_density
from .simulator.sampling import ReadoutError, apply_readout, marginal, sample_shots
from .tomography import reconstruct, state_fidelity_to
from .transpiler.kak import num_cnots
from .transpiler.routing import LayoutPermutation
from .transpiler.pipeline import (
    PassConfig,
    TranspileReport,
    best_of_trials,
    efficient_pipeline,
    semantic_fidelity,
    transpile_cascade,
)

STRATEGIES = ("default", "efficient")
CASCADE = (3, 2, 1)


def split_at_controlled_u3(circuit: Circuit) -> list[tuple[Circuit, int]]:
    """Segments for the efficient recipe, each paired with its optimization level.

    Every CU3 becomes its own segment: level 3 when it needs a single CX and
    level 2 otherwise. Runs of other gates share one level-1 segment.
    """
    out: list[tuple[Circuit, int]] = []
    run: list[Instruction] = []
    for inst in circuit.instructions:
        if inst.name != "cu3":
            run.append(inst)
            continue
        if run:
            out.append((circuit.with_instructions(run), 1))
            run = []
        single = num_cnots(controlled(u3_matrix(*inst.params))) == 1
        out.append((circuit.with_instructions([inst]), 3 if single else 2))
    if run or not out:
        out.append((circuit.with_instructions(run), 1))
    return out


def efficient_transpile(
    circuit: Circuit,
    backend: str,
    seed: int = 0,
    trials: int = 100,
    calibration: CalibrationData | None = None,
) -> tuple[Circuit, TranspileReport]:
    """Segment-wise transpilation for the triangle; the line re-targets that result.

    Triangle: each segment at its own level, joined, then levels 3 and 1.
    Line: the triangle circuit is re-transpiled at levels 3, 2, 1, best of
    ``trials`` seeds.
    """
    tri = PRESETS["triangle"]
    parts = split_at_controlled_u3(circuit)
    cfgs = [PassConfig(level, seed, coupling=tri) for _, level in parts]
    out, report = efficient_pipeline([p for p, _ in parts], cfgs, final_levels=(3, 1))
    if backend == "triangle":
        report.extra["strategy"] = "efficient"
        return out, report
    cfg = PassConfig(3, seed, max_trials=trials, coupling=PRESETS[backend], calibration=calibration)
    line_out, line_rep = best_of_trials(out, cfg, runner=partial(transpile_cascade, levels=CASCADE))
    layout = report.layout.then(line_rep.layout)
    line_rep.layout = layout
    line_rep.semantic_fidelity = semantic_fidelity(circuit, line_out, layout)
    line_rep.extra["strategy"] = "efficient"
    return line_out, line_rep


def default_transpile(
    circuit: Circuit,
    backend: str,
    seed: int = 0,
    trials: int = 100,
    calibration: CalibrationData | None = None,
) -> tuple[Circuit, TranspileReport]:
    """Best of ``trials`` seeds of the 3 -> 2 -> 1 level cascade."""
    cfg = PassConfig(3, seed, max_trials=trials, coupling=PRESETS[backend], calibration=calibration)
    out, rep = best_of_trials(circuit, cfg, runner=partial(transpile_cascade, levels=CASCADE))
    rep.extra["strategy"] = "default"
    return out, rep


def transpile_with_strategy(circuit: Circuit, backend: str, strategy: str, **kw) -> tuple[Circuit, TranspileReport]:
    if backend not in PRESETS:
        raise CircuitError(f"unknown backend {backend!r}")
    if strategy == "efficient":
        return efficient_transpile(circuit, backend, **kw)
    if strategy == "default":
        return default_transpile(circuit, backend, **kw)
    raise CircuitError(f"unknown strategy {strategy!r}")


def compdecomp_circuit(
    label: InputStateLabel,
    backend: str,
    strategy: str,
    seed: int = 0,
    trials: int = 100,
    angles: CompressionAngles | None = None,
    calibration: CalibrationData | None = None,
    compressed: tuple[Circuit, TranspileReport] | None = None,
) -> tuple[Circuit, TranspileReport]:
    """Physical compression/decompression circuit for one input label.

    Efficient: the efficient compression circuit, a reset, then its adjoint.
    ``compressed`` can pass in that circuit when it is already known.
    Default: the whole logical experiment through the default strategy.
    """
    comp = build_compression_circuit(angles)
    if strategy == "efficient":
        phys, rep = compressed or efficient_transpile(comp, backend, seed, trials, calibration)
        circuit = build_compdecomp_experiment(label, phys, rep.layout)
        logical = build_compdecomp_experiment(label, comp)
        layout = LayoutPermutation(rep.layout.initial, rep.layout.initial)
        report = TranspileReport(
            gate_counts(circuit),
            depth(circuit),
            layout,
            seed,
            semantic_fidelity(logical, circuit, layout),
            rep.trials_run,
            {"strategy": "efficient"},
        )
        return circuit, report
    logical = build_compdecomp_experiment(label, comp)
    return default_transpile(logical, backend, seed, trials, calibration)


# -- simulation -----------------------------------------------------------


def _readout_for(circuit: Circuit, calibration: CalibrationData | None) -> tuple[list[int], list[ReadoutError | None]]:
    clbits = measured_qubits(circuit)
    qubits = [clbits[k] for k in range(len(clbits))]
    if calibration is None:
        return qubits, [None] * len(qubits)
    errs = [ReadoutError(calibration.qubit(q).readout_p01, calibration.qubit(q).readout_p10) for q in qubits]
    return qubits, errs


def outcome_distribution(circuit: Circuit, calibration: CalibrationData | None = None, scale: float = 1.0) -> np.ndarray:
    """Exact distribution over classical bits (bit k = clbit k), readout error included."""
    noise = NoiseModel(calibration, scale) if calibration is not None else None
    rho = run_density(circuit, noise)
    qubits, errs = _readout_for(circuit, calibration)
    return apply_readout(marginal(rho.probabilities(), qubits), errs)


def compdecomp_fidelity(circuit: Circuit, calibration: CalibrationData | None = None, scale: float = 1.0) -> float:
    """Probability of reading 000."""
    return float(outcome_distribution(circuit, calibration, scale)[0])


def cell_seed(seed: int, *keys: int) -> int:
    """Independent sampling seed for one (strategy, label, run, ...) cell."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def compdecomp_shots(
    circuit: Circuit, calibration: CalibrationData | None, shots: int, runs: int, seed: int, stream: Sequence[int] = ()
) -> list[float]:
    p = outcome_distribution(circuit, calibration)
    return [sample_shots(p, None, shots, cell_seed(seed, *stream, r)).probability("000") for r in range(runs)]


def compression_shots(
    label: InputStateLabel,
    circuit: Circuit,
    report: TranspileReport,
    calibration: CalibrationData | None,
    shots: int,
    runs: int,
    seed: int,
    angles: CompressionAngles | None = None,
    stream: Sequence[int] = (),
) -> list[float]:
    """Tomographic fidelity to the ideal compressed state, one value per run."""
    exp = build_compression_experiment(label, circuit, report.layout)
    target = ideal_compressed_state(label, angles)
    dists = {s.label: outcome_distribution(c, calibration) for s, c in exp.plan}
    out = []
    for r in range(runs):
        counts = {}
        for i, (name, p) in enumerate(dists.items()):
            counts[name] = sample_shots(p, None, shots, cell_seed(seed, *stream, r, i)).counts
        out.append(state_fidelity_to(reconstruct(counts), target))
    return out


def compression_exact_fidelity(
    label: InputStateLabel,
    circuit: Circuit,
    report: TranspileReport,
    calibration: CalibrationData | None = None,
    angles: CompressionAngles | None = None,
) -> float:
    exp = build_compression_experiment(label, circuit, report.layout)
    target = ideal_compressed_state(label, angles)
    counts = {}
    for s, c in exp.plan:
        p = outcome_distribution(c, calibration)
        counts[s.label] = {format(i, "02b"): float(v) for i, v in enumerate(p)}
    return state_fidelity_to(reconstruct(counts), target)


# -- reports --------------------------------------------------------------


@dataclass
class ExperimentRow:
    label: str
    strategy: str
    backend: str
    ideal_fidelity: float
    fidelity_mean: float
    fidelity_std: float
    noisy: bool
    transpile: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "strategy": self.strategy,
            "backend": self.backend,
            "ideal_fidelity": self.ideal_fidelity,
            "fidelity_mean": self.fidelity_mean,
            "fidelity_std": self.fidelity_std,
            "noisy": self.noisy,
            "transpile": self.transpile,
        }


CSV_COLUMNS = ("label", "strategy", "backend", "fidelity_mean", "fidelity_std")


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r["label"], r["strategy"], r["backend"], repr(float(r["fidelity_mean"])), repr(float(r["fidelity_std"]))])
    return buf.getvalue()


def rows_to_json(meta: dict, rows: Sequence[dict]) -> str:
    return json.dumps({**meta, "rows": list(rows)}, indent=2, sort_keys=True)


def run_experiment(
    experiment: str,
    labels: Sequence[InputStateLabel],
    backend: str,
    strategies: Sequence[str],
    calibration: CalibrationData | None = None,
    shots: int = 8192,
    runs: int = 10,
    seed: int = 0,
    trials: int = 100,
    rounded_angles: bool = False,
) -> list[ExperimentRow]:
    if experiment not in ("compression", "compdecomp"):
        raise ValueError(f"unknown experiment {experiment!r}")
    if shots < 1 or runs < 1:
        raise ValueError("shots and runs must be positive")
    if calibration is not None:
        problems = calibration.check_coupling(PRESETS[backend])
        if problems:
            raise CalibrationError("; ".join(problems))
    angles = compression_angles(rounded_angles)
    rows = []
    for strategy in strategies:
        comp_cache = None
        for label in labels:
            stream = (STRATEGIES.index(strategy), list(InputStateLabel).index(label))
            if experiment == "compdecomp":
                if strategy == "efficient" and comp_cache is None:
                    comp_cache = efficient_transpile(build_compression_circuit(angles), backend, seed, trials, calibration)
                circuit, rep = compdecomp_circuit(label, backend, strategy, seed, trials, angles, calibration, comp_cache)
                ideal = compdecomp_fidelity(circuit)
                values = compdecomp_shots(circuit, calibration, shots, runs, seed, stream)
            else:
                if comp_cache is None:
                    comp_cache = transpile_with_strategy(
                        build_compression_circuit(angles), backend, strategy, seed=seed, trials=trials, calibration=calibration
                    )
                circuit, rep = comp_cache
                ideal = compression_exact_fidelity(label, circuit, rep, None, angles)
                values = compression_shots(label, circuit, rep, calibration, shots, runs, seed, angles, stream)
            rows.append(
                ExperimentRow(
                    label.name,
                    strategy,
                    backend,
                    ideal,
                    float(np.mean(values)),
                    float(np.std(values)),
                    calibration is not None,
                    rep.to_dict(),
                )
            )
    return rows
