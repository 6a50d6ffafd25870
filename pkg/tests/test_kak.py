import math

import numpy as np
import pytest

from conftest import equal_up_to_phase, haar_unitary
from qcflate.circuit import Circuit, CircuitError, circuit_unitary, count_cx, cx, swap, u3_matrix
from qcflate.transpiler.kak import canonical_gate, kak, kak_decompose, num_cnots, weyl_coordinates

CNOT = circuit_unitary(Circuit(2, (cx(0, 1),)))
SWAP = circuit_unitary(Circuit(2, (swap(0, 1),)))


def _in_weyl_chamber(a, b, c, tol=1e-9):
    return math.pi / 4 + tol >= a >= b - tol and b + tol >= abs(c)


def test_kak_reconstructs_random_unitaries(rng):
    for _ in range(100):
        u = haar_unitary(rng, 4)
        dec = kak(u)
        assert np.allclose(dec.unitary(), u, atol=1e-9)
        for m in (dec.a0, dec.a1, dec.b0, dec.b1):
            assert m.shape == (2, 2) and np.allclose(m.conj().T @ m, np.eye(2))
        assert _in_weyl_chamber(*dec.coords)


@pytest.mark.parametrize("u, k", [(np.eye(4), 0), (CNOT, 1), (SWAP, 3)])
def test_named_gate_classes(u, k):
    assert num_cnots(u) == k
    assert count_cx(kak_decompose(u)) == k


def test_local_unitaries_need_no_cnots(rng):
    u = np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2))
    assert num_cnots(u) == 0
    assert weyl_coordinates(u) == pytest.approx((0, 0, 0), abs=1e-8)


def test_coordinates_of_known_gates():
    assert weyl_coordinates(CNOT) == pytest.approx((math.pi / 4, 0, 0), abs=1e-8)
    assert weyl_coordinates(SWAP) == pytest.approx((math.pi / 4,) * 3, abs=1e-8)


def test_canonical_gate_is_invariant_under_locals(rng):
    a, b, c = 0.6, 0.3, -0.1
    u = np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2)) @ canonical_gate(a, b, c) @ np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2))
    assert weyl_coordinates(u) == pytest.approx((a, b, c), abs=1e-8)


def test_two_cnot_class(rng):
    u = np.kron(haar_unitary(rng, 2), np.eye(2)) @ canonical_gate(0.5, 0.2, 0.0)
    assert num_cnots(u) == 2
    c = kak_decompose(u)
    assert count_cx(c) == 2 and equal_up_to_phase(circuit_unitary(c), u)


def test_kak_decompose_is_exact(rng):
    for _ in range(30):
        u = haar_unitary(rng, 4)
        c = kak_decompose(u)
        assert count_cx(c) == 3
        assert {i.name for i in c.instructions} <= {"rz", "sx", "cx"}
        assert equal_up_to_phase(circuit_unitary(c), u, 1e-10)


def test_controlled_gate_cnot_count():
    cu = np.eye(4, dtype=complex)
    # control qubit 0, target qubit 1
    cu[np.ix_([1, 3], [1, 3])] = u3_matrix(1.23, 0, math.pi)
    assert num_cnots(cu) == 1


def test_rejects_non_unitary():
    with pytest.raises(CircuitError):
        kak(np.ones((4, 4)))
