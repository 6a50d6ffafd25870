"""``qcflate`` command-line driver.

Exit codes: 0 success, 2 bad input, 3 validation or semantic failure,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import qasm
from .circuit import PRESETS, CircuitError
from .compression import InputStateLabel, build_compression_circuit, compression_angles
from .experiments import STRATEGIES, rows_to_csv, rows_to_json, run_experiment, transpile_with_strategy
from .simulator.calibration import CalibrationData, CalibrationError, load_calibration, validate_calibration_text
from .simulator.statevector import SimulationError
from .tomography import TomographyError
from .transpiler.pipeline import FIDELITY_FLOOR

EXIT_OK, EXIT_INPUT, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3, 4
SEED_ENV = "QCFLATE_SEED"
BUILTINS = {"compression": lambda rounded: build_compression_circuit(compression_angles(rounded))}


class InputError(Exception):
    pass


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None


def parse_labels(text: str) -> list[InputStateLabel]:
    if text.strip().upper() == "ALL":
        return list(InputStateLabel)
    try:
        return [InputStateLabel.parse(t) for t in text.split(",")]
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _calibration(arg: str | None, backend: str) -> CalibrationData | None:
    if arg is None:
        return None
    try:
        cal = load_calibration(arg)
    except FileNotFoundError:
        raise InputError(f"calibration file not found: {arg}") from None
    except CalibrationError as exc:
        raise InputError(str(exc)) from None
    problems = cal.check_coupling(PRESETS[backend])
    if problems:
        raise InputError("; ".join(problems))
    return cal


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# -- verbs -------------------------------------------------------------------


def cmd_transpile(args) -> int:
    seed = resolve_seed(args.seed)
    if args.input in BUILTINS:
        circuit = BUILTINS[args.input](args.rounded_angles)
        stem = args.input
    else:
        path = Path(args.input)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        circuit = qasm.load(path)
        stem = path.stem
    if circuit.num_qubits > PRESETS[args.backend].num_qubits:
        raise InputError(f"circuit has {circuit.num_qubits} qubits, backend {args.backend} has {PRESETS[args.backend].num_qubits}")
    cal = _calibration(args.calibration, args.backend)
    out_circ, report = transpile_with_strategy(
        circuit, args.backend, args.strategy, seed=seed, trials=args.trials, calibration=cal
    )
    report.extra.update({"backend": args.backend, "source": stem})
    out = Path(args.out)
    qpath = _write(out, f"{stem}.{args.backend}.{args.strategy}.qasm", qasm.dumps(out_circ))
    rpath = _write(out, f"{stem}.{args.backend}.{args.strategy}.json", _dump_json(report.to_dict()))
    fid = report.semantic_fidelity
    print(f"cx={report.cx} depth={report.depth} counts={json.dumps(report.counts, sort_keys=True)}")
    print(f"wrote {qpath} and {rpath}")
    if fid is not None and not np.isnan(fid) and fid < FIDELITY_FLOOR:
        print(f"error: transpiled circuit does not match its source (fidelity {fid:.12f})", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_experiment(args) -> int:
    seed = resolve_seed(args.seed)
    if args.noisy and args.calibration is None:
        raise InputError("--noisy needs --calibration")
    labels = parse_labels(args.label)
    if args.shots < 1 or args.runs < 1 or args.trials < 1:
        raise InputError("--shots, --runs and --trials must be positive")
    cal = _calibration(args.calibration, args.backend)
    strategies = list(STRATEGIES) if args.strategy == "both" else [args.strategy]
    rows = run_experiment(
        args.experiment,
        labels,
        args.backend,
        strategies,
        calibration=cal,
        shots=args.shots,
        runs=args.runs,
        seed=seed,
        trials=args.trials,
        rounded_angles=args.rounded_angles,
    )
    meta = {
        "experiment": args.experiment,
        "backend": args.backend,
        "calibration": args.calibration,
        "shots": args.shots,
        "runs": args.runs,
        "seed": seed,
        "trials": args.trials,
        "rounded_angles": args.rounded_angles,
    }
    dicts = [r.to_dict() for r in rows]
    stem = f"{args.experiment}.{args.backend}"
    out = Path(args.out)
    _write(out, stem + ".json", rows_to_json(meta, dicts) + "\n")
    _write(out, stem + ".csv", rows_to_csv(dicts))
    for r in rows:
        print(f"{r.label:8s} {r.strategy:9s} ideal={r.ideal_fidelity:.6f} mean={r.fidelity_mean:.6f} std={r.fidelity_std:.6f}")
    return EXIT_OK


def cmd_calibration_validate(args) -> int:
    path = Path(args.path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    problems = validate_calibration_text(path.read_text())
    if not problems and args.backend:
        problems = CalibrationData.load(path).check_coupling(PRESETS[args.backend])
    for p in problems:
        print(f"{path}: {p}")
    if problems:
        return EXIT_INPUT
    print(f"{path}: valid")
    return EXIT_OK


def _row_key(row: dict) -> tuple:
    order = {label.name: i for i, label in enumerate(InputStateLabel)}
    return (row["experiment"], row["backend"], row["strategy"], order.get(row["label"], len(order)), row["label"])


def merge_reports(docs: Sequence[dict]) -> dict:
    """Concatenate experiment reports into one, ordered by (experiment, backend, strategy, label)."""
    rows, seen, sources = [], set(), []
    for doc in docs:
        if "rows" not in doc:
            raise InputError("not an experiment report (no 'rows')")
        meta = {k: v for k, v in doc.items() if k != "rows"}
        sources.append(meta)
        for row in doc["rows"]:
            row = {**row, "experiment": row.get("experiment", meta.get("experiment", "")), "calibration": meta.get("calibration")}
            key = _row_key(row) + (row["calibration"],)
            if key in seen:
                raise CircuitError(f"duplicate row {key[:3] + (row['label'],)}")
            seen.add(key)
            rows.append(row)
    rows.sort(key=lambda r: _row_key(r) + (str(r["calibration"]),))
    return {"sources": sorted(sources, key=lambda m: json.dumps(m, sort_keys=True)), "rows": rows}


def cmd_report_merge(args) -> int:
    docs = []
    for p in args.reports:
        try:
            docs.append(json.loads(Path(p).read_text()))
        except FileNotFoundError:
            raise InputError(f"no such file: {p}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}: line {exc.lineno}: {exc.msg}") from None
    merged = merge_reports(docs)
    out = Path(args.out)
    _write(out, "merged.json", _dump_json(merged))
    _write(out, "merged.csv", rows_to_csv(merged["rows"]))
    print(f"merged {len(merged['rows'])} rows from {len(docs)} reports into {out}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcflate", description="Transpile and simulate 3-to-2 qubit compression circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, strategy_choices):
        p.add_argument("--backend", choices=sorted(PRESETS), default="triangle")
        p.add_argument("--strategy", choices=strategy_choices, default=strategy_choices[-1])
        p.add_argument("--seed", type=int, default=None, help=f"base seed (falls back to ${SEED_ENV}, then 0)")
        p.add_argument("--trials", type=_positive, default=100, help="transpile trials per strategy")
        p.add_argument("--calibration", default=None, help="calibration JSON path or shipped name (bogota_like, yorktown_like)")
        p.add_argument("--paper-angles", dest="rounded_angles", action="store_true", help="use the rounded angles 1.91 and 1.23")
        p.add_argument("--out", default=".", help="output directory")

    t = sub.add_parser("transpile", help="transpile a circuit file (or the builtin 'compression')")
    t.add_argument("input")
    common(t, ["default", "efficient"])
    t.set_defaults(func=cmd_transpile)

    e = sub.add_parser("experiment", help="simulate compression or compression/decompression runs")
    e.add_argument("experiment", choices=["compression", "compdecomp"])
    e.add_argument("--label", default="ALL", help="ALL or comma-separated labels (ZERO, ONE, PLUS, MINUS, Y_PLUS, Y_MINUS)")
    e.add_argument("--shots", type=int, default=8192)
    e.add_argument("--runs", type=int, default=10)
    e.add_argument("--noisy", action="store_true", help="require a calibration")
    common(e, ["default", "efficient", "both"])
    e.set_defaults(func=cmd_experiment)

    c = sub.add_parser("calibration", help="calibration file tools")
    csub = c.add_subparsers(dest="action", required=True)
    v = csub.add_parser("validate")
    v.add_argument("path")
    v.add_argument("--backend", choices=sorted(PRESETS), default=None, help="also check edges against this coupling map")
    v.set_defaults(func=cmd_calibration_validate)

    r = sub.add_parser("report", help="experiment report tools")
    rsub = r.add_subparsers(dest="action", required=True)
    m = rsub.add_parser("merge")
    m.add_argument("reports", nargs="+")
    m.add_argument("--out", default=".")
    m.set_defaults(func=cmd_report_merge)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, qasm.QasmError, CalibrationError, TomographyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SimulationError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
