"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import haar_state, haar_unitary
from qcflate.circuit import LINE3, PRESETS, Circuit, circuit_unitary, count_cx, cx, swap, validate
from qcflate.compression import (
    InputStateLabel,
    build_compression_circuit,
    compression_angles,
    ideal_compressed_state,
    qubit2_fidelity,
)
from qcflate.experiments import (
    compdecomp_circuit,
    compdecomp_fidelity,
    compression_shots,
    default_transpile,
    efficient_transpile,
)
from qcflate.simulator import load_calibration, run_density
from qcflate.tomography import exact_counts, reconstruct
from qcflate.transpiler.kak import kak, kak_decompose, num_cnots

LABELS = list(InputStateLabel)
TRIALS = 100


def report(capsys, n: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def perm(layout) -> np.ndarray:
    """Brute-force permutation matrix: logical qubit l sits on physical layout[l]."""
    n = len(layout)
    m = np.zeros((2**n, 2**n))
    for i in range(2**n):
        bits = [(i >> l) & 1 for l in range(n)]
        j = sum(b << layout[l] for l, b in enumerate(bits))
        m[j, i] = 1
    return m


def operator_fidelity(src: Circuit, out: Circuit, layout) -> float:
    u = circuit_unitary(src)
    v = perm(layout.final).T @ circuit_unitary(out) @ perm(layout.initial)
    return abs(np.trace(u.conj().T @ v)) / u.shape[0]


# -- shared, expensive artifacts (computed once per session) --


@pytest.fixture(scope="module")
def compression_runs():
    comp = build_compression_circuit()
    out = {}
    for backend in PRESETS:
        t = time.perf_counter()
        out[backend, "efficient"] = efficient_transpile(comp, backend, seed=0, trials=TRIALS) + (time.perf_counter() - t,)
        t = time.perf_counter()
        out[backend, "default"] = default_transpile(comp, backend, seed=0, trials=TRIALS) + (time.perf_counter() - t,)
    return out


@pytest.fixture(scope="module")
def compdecomp_runs(compression_runs):
    out = {}
    for backend in PRESETS:
        eff = compression_runs[backend, "efficient"][:2]
        for label in LABELS:
            out[backend, "efficient", label] = compdecomp_circuit(label, backend, "efficient", compressed=eff)
            out[backend, "default", label] = compdecomp_circuit(label, backend, "default", seed=0, trials=TRIALS)
    return out


# -- criteria --


def test_criterion_01_triangle_efficient_counts(capsys, compression_runs):
    out, rep, secs = compression_runs["triangle", "efficient"]
    c = rep.counts
    ok = c.get("cx") == 9 and c.get("rz", 0) <= 23 and c.get("sx", 0) <= 14 and rep.depth <= 37 and secs < 10
    report(capsys, 1, ok, f"triangle efficient cx={c.get('cx')} rz={c.get('rz')} sx={c.get('sx')} depth={rep.depth} in {secs:.2f}s")


def test_criterion_02_line_best_of_100(capsys, compression_runs):
    out, rep, secs = compression_runs["line", "efficient"]
    ok = rep.cx <= 10 and rep.depth <= 41 and secs < 60 and rep.trials_run == TRIALS
    report(capsys, 2, ok, f"line best of {rep.trials_run}: cx={rep.cx} rz={rep.counts.get('rz')} sx={rep.counts.get('sx')} depth={rep.depth} in {secs:.2f}s")


def test_criterion_03_compdecomp_counts(capsys, compdecomp_runs):
    tri = max(count_cx(compdecomp_runs["triangle", "efficient", l][0]) for l in LABELS)
    line = max(count_cx(compdecomp_runs["line", "efficient", l][0]) for l in LABELS)
    report(capsys, 3, tri <= 18 and line <= 20, f"compdecomp efficient cx: triangle={tri} line={line}")


def test_criterion_04_semantic_preservation(capsys, compression_runs, compdecomp_runs):
    comp = build_compression_circuit()
    worst, where = 1.0, ""
    for (backend, strategy), (out, rep, _) in compression_runs.items():
        assert validate(out, PRESETS[backend]) == []
        f = operator_fidelity(comp, out, rep.layout)
        if f < worst:
            worst, where = f, f"{backend}/{strategy}"
    # compdecomp circuits contain a reset: check the certified superoperator fidelity
    cd_worst = min(rep.semantic_fidelity for _, rep in compdecomp_runs.values())
    ok = worst >= 1 - 1e-9 and cd_worst >= 1 - 1e-9
    report(capsys, 4, ok, f"min 8x8 operator fidelity {worst:.15f} ({where or 'all'}); min compdecomp fidelity {cd_worst:.15f}")


def test_criterion_05_disentanglement(capsys):
    rng = np.random.default_rng(2024)
    states = [haar_state(rng, 2) for _ in range(100)]
    exact = min(qubit2_fidelity(s) for s in states)
    rounded = min(qubit2_fidelity(s, compression_angles(rounded=True)) for s in states)
    ok = exact >= 1 - 1e-9 and rounded >= 1 - 1e-5
    report(capsys, 5, ok, f"min qubit-2 fidelity exact={exact:.15f} rounded-angles={rounded:.10f}")


def test_criterion_06_ideal_round_trip(capsys, compdecomp_runs):
    worst = 0.0
    for label in LABELS:
        logical = compdecomp_circuit(label, "triangle", "efficient", trials=1)[0]
        worst = max(worst, abs(1 - run_density(logical).probabilities()[0]))
    for circuit, _ in compdecomp_runs.values():
        worst = max(worst, abs(1 - compdecomp_fidelity(circuit)))
    report(capsys, 6, worst <= 1e-9, f"max |P(000) - 1| over 6 labels x 4 circuits = {worst:.2e}")


def test_criterion_07_tomography(capsys, compression_runs):
    rng = np.random.default_rng(7)
    worst_td = 0.0
    for rank in (1, 2, 3, 4):
        for _ in range(25):
            g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
            rho = g @ g.conj().T
            rho /= np.trace(rho).real
            diff = reconstruct(exact_counts(rho)) - rho
            worst_td = max(worst_td, 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())
    circuit, rep, _ = compression_runs["triangle", "efficient"]
    fid = {l.name: compression_shots(l, circuit, rep, None, 8192, 1, seed=11)[0] for l in LABELS}
    worst_f = min(fid.values())
    ok = worst_td <= 1e-10 and worst_f >= 1 - 0.02
    report(capsys, 7, ok, f"exact trace distance {worst_td:.2e}; min 8192-shot fidelity {worst_f:.4f}")


def test_criterion_08_noise_ordering(capsys, compdecomp_runs):
    bog, york = load_calibration("bogota_like"), load_calibration("yorktown_like")
    lines, ok = [], True
    for label in LABELS:
        eff = compdecomp_fidelity(compdecomp_runs["line", "efficient", label][0], bog)
        dft = compdecomp_fidelity(compdecomp_runs["line", "default", label][0], bog)
        ok &= eff >= dft and eff < 1 and dft < 1
        for strategy in ("efficient", "default"):
            on_bog = compdecomp_fidelity(compdecomp_runs["line", strategy, label][0], bog)
            # own topology and the identical line circuit on the worse device
            own = compdecomp_fidelity(compdecomp_runs["triangle", strategy, label][0], york)
            same = compdecomp_fidelity(compdecomp_runs["line", strategy, label][0], york)
            ok &= own < on_bog and same < on_bog
        lines.append(f"{label.name}:{eff:.3f}/{dft:.3f}")
    report(capsys, 8, bool(ok), "bogota efficient/default " + " ".join(lines))


def test_criterion_09_stochastic_variance(capsys, compression_runs):
    _, rep, _ = compression_runs["line", "default"]
    counts = np.array(rep.extra["trial_cx_counts"])
    frac = float(np.mean(counts == counts.min()))
    classes = dict(zip(*np.unique(counts, return_counts=True)))
    ok = len(counts) == TRIALS and len(classes) > 1 and frac > 0
    report(capsys, 9, ok, f"line default cx classes {{{', '.join(f'{int(k)}: {int(v)}' for k, v in classes.items())}}}; min-class fraction {frac:.2f}")


def test_criterion_10_kak(capsys):
    rng = np.random.default_rng(10)
    t = time.perf_counter()
    worst = 1.0
    for _ in range(1000):
        u = haar_unitary(rng, 4)
        v = kak(u).unitary()
        w = circuit_unitary(kak_decompose(u))
        worst = min(worst, abs(np.trace(u.conj().T @ v)) / 4, abs(np.trace(u.conj().T @ w)) / 4)
    secs = time.perf_counter() - t
    classes = (
        num_cnots(circuit_unitary(Circuit(2, (cx(0, 1),)))),
        num_cnots(circuit_unitary(Circuit(2, (swap(0, 1),)))),
        num_cnots(np.eye(4)),
    )
    ok = worst >= 1 - 1e-8 and classes == (1, 3, 0) and secs < 30
    report(capsys, 10, ok, f"min fidelity {worst:.15f}; CNOT/SWAP/I -> {classes}; {secs:.2f}s")


def _cli(args, out: Path, hashseed: str) -> None:
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    env.pop("QCFLATE_SEED", None)
    subprocess.run([sys.executable, "-m", "qcflate.cli", *args, "--out", str(out)], check=True, env=env, capture_output=True)


def test_criterion_11_determinism(capsys, tmp_path):
    jobs = [
        ["transpile", "compression", "--backend", "line", "--strategy", "default", "--trials", "10", "--seed", "5"],
        ["transpile", "compression", "--backend", "triangle", "--strategy", "efficient", "--seed", "5"],
        ["experiment", "compdecomp", "--backend", "line", "--label", "PLUS,Y_MINUS", "--calibration", "bogota_like",
         "--shots", "2000", "--runs", "3", "--trials", "3", "--seed", "5"],
        ["experiment", "compression", "--backend", "triangle", "--label", "ONE", "--strategy", "efficient",
         "--shots", "1000", "--runs", "2", "--trials", "2", "--seed", "5"],
    ]
    for run, hashseed in (("a", "1"), ("b", "999")):
        for args in jobs:
            _cli(args, tmp_path / run, hashseed)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names)
    ok = same and names == sorted(p.name for p in (tmp_path / "b").iterdir()) and len(names) == 8
    report(capsys, 11, ok, f"{len(names)} files bit-identical across two processes: {same}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
