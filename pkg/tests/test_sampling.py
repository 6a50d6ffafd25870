import numpy as np
import pytest

from qcflate.simulator import ReadoutError, ShotResult, SimulationError, apply_readout, marginal, sample_shots


def test_confusion_columns_sum_to_one():
    m = ReadoutError(0.1, 0.02).confusion()
    assert np.allclose(m.sum(axis=0), 1)
    assert m[0, 1] == 0.1 and m[1, 0] == 0.02


def test_readout_per_bit_matches_kron_oracle():
    p = np.array([0.5, 0.1, 0.3, 0.1])
    e0, e1 = ReadoutError(0.1, 0.05), ReadoutError(0.2, 0.01)
    oracle = np.kron(e1.confusion(), e0.confusion()) @ p
    assert np.allclose(apply_readout(p, [e0, e1]), oracle)


def test_sampling_is_seeded_and_consistent():
    p = np.array([0.7, 0.0, 0.0, 0.3])
    a = sample_shots(p, None, 1000, seed=5)
    b = sample_shots(p, None, 1000, seed=5)
    assert a.counts == b.counts
    assert set(a.counts) <= {"00", "11"}
    assert sum(a.counts.values()) == 1000
    big = sample_shots(p, None, 200_000, seed=1)
    assert big.probability("11") == pytest.approx(0.3, abs=5e-3)


def test_merge():
    a = ShotResult({"0": 3, "1": 1}, 4)
    b = ShotResult({"1": 2}, 2)
    m = a.merge(b)
    assert m.counts == {"0": 3, "1": 3} and m.shots == 6


def test_marginal_reorders_bits():
    p = np.zeros(8)
    p[0b110] = 1.0  # qubits 1 and 2 set
    assert np.allclose(marginal(p, [2, 0]), [0, 1, 0, 0])
    assert np.allclose(marginal(p, [0]), [1, 0])


def test_invalid_inputs():
    with pytest.raises(SimulationError):
        sample_shots([0.5, 0.6], None, 10)
    with pytest.raises(SimulationError):
        sample_shots([1.0, 0.0], None, 0)
    with pytest.raises(SimulationError):
        ReadoutError(1.2, 0)


def test_binomial_bounds():
    r = sample_shots([0.5, 0.5], None, 10**6, seed=3)
    assert abs(r.counts["0"] - 500_000) < 5 * 500
    p10 = sample_shots([1.0, 0.0], [ReadoutError(0.0, 0.1)], 10**5, seed=4)
    assert abs(p10.counts["1"] - 10_000) < 5 * np.sqrt(10**5 * 0.09)


def test_split_halves_agree_with_one_run():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    halves = sample_shots(p, None, 50_000, seed=1).merge(sample_shots(p, None, 50_000, seed=2))
    observed = np.array([halves.counts[k] for k in ("00", "01", "10", "11")])
    expected = p * 100_000
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    assert chi2 < 30  # 3 dof, p well below 1e-6 beyond this
