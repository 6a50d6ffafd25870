import numpy as np
import pytest

from conftest import haar_state, haar_unitary
from qcflate.circuit import Circuit, h, cx
from qcflate.compression import InputStateLabel, ideal_compressed_state
from qcflate.simulator import run_density, sample_shots
from qcflate.tomography import (
    OPERATORS,
    PAULI,
    TomographyError,
    exact_counts,
    expectation_values,
    fidelity_report,
    linear_inversion,
    load_counts,
    project_to_physical,
    reconstruct,
    save_counts,
    setting_probabilities,
    tomography_plan,
    tomography_settings,
)


def _random_rho(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _trace_distance(a, b):
    return 0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum()


def test_nine_settings_fifteen_operators():
    assert len(tomography_settings()) == 9
    assert len(OPERATORS) == 15


def test_expectations_match_direct_traces(rng):
    rho = _random_rho(rng)
    e = expectation_values(exact_counts(rho))
    for op in OPERATORS:
        # label character k acts on tomography qubit k; qubit 0 is the right kron factor
        direct = np.trace(rho @ np.kron(PAULI[op[1]], PAULI[op[0]])).real
        assert e[op] == pytest.approx(direct, abs=1e-12)


def test_exact_reconstruction(rng):
    for rank in (1, 2, 4):
        for _ in range(10):
            rho = _random_rho(rng, rank)
            assert _trace_distance(reconstruct(exact_counts(rho)), rho) < 1e-10


def test_setting_probabilities_agree_with_simulated_circuits():
    state = Circuit(2, (h(0), cx(0, 1)))
    rho = run_density(state).data
    for setting, circ in tomography_plan(state, (0, 1)):
        p = run_density(circ).probabilities()
        assert np.allclose(p, setting_probabilities(rho, setting))


def test_projection_is_physical_and_idempotent(rng):
    m = _random_rho(rng) + 0.3 * np.diag([1, -1, 0.5, -0.5])
    m /= np.trace(m).real
    p = project_to_physical(m)
    w = np.linalg.eigvalsh(p)
    assert w.min() >= -1e-12 and np.trace(p).real == pytest.approx(1)
    assert np.allclose(project_to_physical(p), p)


def test_projection_known_spectrum():
    # eigenvalues (0.6, 0.5, -0.1, 0.0): clip -0.1, spread over the rest
    m = np.diag([0.6, 0.5, -0.1, 0.0])
    p = project_to_physical(m)
    assert np.allclose(np.sort(np.diag(p).real), [0, 0, 0.45, 0.55])


def test_sampled_reconstruction_of_compressed_states():
    for i, label in enumerate(InputStateLabel):
        target = ideal_compressed_state(label)
        rho = target.projector()
        counts = {}
        for j, s in enumerate(tomography_settings()):
            counts[s.label] = sample_shots(setting_probabilities(rho, s), None, 8192, seed=100 * i + j).counts
        assert fidelity_report(reconstruct(counts), target) > 0.98


def test_counts_file_round_trip(tmp_path):
    counts = {"ZZ": {"00": 5, "11": 3}, "XX": {"01": 8}}
    save_counts(tmp_path / "c.json", counts)
    assert load_counts(tmp_path / "c.json") == counts
    (tmp_path / "bad.json").write_text("[1, 2]")
    with pytest.raises(TomographyError):
        load_counts(tmp_path / "bad.json")


def test_missing_setting_rejected():
    with pytest.raises(TomographyError):
        expectation_values({"ZZ": {"00": 1}})
