import math

import numpy as np
import pytest

from conftest import equal_up_to_phase, haar_unitary
from qcflate.circuit import (
    LINE3,
    TRIANGLE3,
    Circuit,
    CircuitError,
    CouplingMap,
    adjoint,
    barrier,
    ccx,
    ch,
    circuit_unitary,
    cu3,
    cx,
    depth,
    gate_counts,
    h,
    measure,
    normalize_angle,
    reset,
    rz,
    swap,
    sx,
    u3,
    u3_matrix,
    validate,
    x,
)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]])
P0 = np.diag([1, 0])
P1 = np.diag([0, 1])


def kron(*ops):
    """Kronecker product written most-significant qubit first."""
    out = np.eye(1)
    for op in ops:
        out = np.kron(out, op)
    return out


def test_qubit_zero_is_least_significant():
    u = circuit_unitary(Circuit(2, (x(0),)))
    assert np.allclose(u, kron(I2, X))
    assert np.allclose(u[:, 0], [0, 1, 0, 0])


def test_cx_control_is_first_operand():
    u = circuit_unitary(Circuit(2, (cx(0, 1),)))
    # control on qubit 0 (rightmost factor), target on qubit 1
    assert np.allclose(u, kron(I2, P0) + kron(X, P1))


def test_cx_truth_table():
    u = circuit_unitary(Circuit(2, (cx(0, 1),)))
    # |q1 q0>: 01 -> 11
    assert u[3, 1] == 1 and u[1, 3] == 1 and u[0, 0] == 1 and u[2, 2] == 1


def test_u3_matrix_entries():
    t, p, l = 0.3, 1.1, -0.7
    m = u3_matrix(t, p, l)
    c, s = math.cos(t / 2), math.sin(t / 2)
    expect = np.array([[c, -np.exp(1j * l) * s], [np.exp(1j * p) * s, np.exp(1j * (p + l)) * c]])
    assert np.allclose(m, expect)


def test_sx_squares_to_x():
    u = circuit_unitary(Circuit(1, (sx(0), sx(0))))
    assert np.allclose(u, X)


def test_rz_is_diagonal():
    u = circuit_unitary(Circuit(1, (rz(0.8, 0),)))
    assert np.allclose(u, np.diag([np.exp(-0.4j), np.exp(0.4j)]))


def test_ccx_and_ch():
    u = circuit_unitary(Circuit(3, (ccx(0, 1, 2),)))
    for i in range(8):
        j = i ^ 4 if (i & 3) == 3 else i
        assert u[j, i] == pytest.approx(1)
    hmat = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    u = circuit_unitary(Circuit(2, (ch(1, 0),)))
    assert np.allclose(u, kron(P0, I2) + kron(P1, hmat))


def test_cu3_is_controlled_u3():
    u = circuit_unitary(Circuit(2, (cu3(0.4, 0.2, 1.3, 0, 1),)))
    assert np.allclose(u, kron(I2, P0) + kron(u3_matrix(0.4, 0.2, 1.3), P1))


def test_swap():
    u = circuit_unitary(Circuit(2, (swap(0, 1),)))
    assert np.allclose(u[:, 1], [0, 0, 1, 0])


@pytest.mark.parametrize("make", [
    lambda: u3(1.2, -0.4, 2.9, 0),
    lambda: u3(-2.0, 3.0, 0.1, 1),
    lambda: cu3(1.91, math.pi, math.pi, 0, 2),
    lambda: cu3(1.23, 0.0, math.pi, 1, 2),
    lambda: sx(2),
    lambda: ch(1, 0),
    lambda: ccx(1, 2, 0),
])
def test_adjoint_inverts_exactly(make):
    c = Circuit(3, (make(),))
    prod = circuit_unitary(adjoint(c)) @ circuit_unitary(c)
    assert equal_up_to_phase(prod, np.eye(8), 1e-12)


def test_adjoint_of_controlled_u3_has_no_relative_phase():
    c = Circuit(2, (cu3(0.7, 0.3, -1.1, 0, 1),))
    prod = circuit_unitary(adjoint(c)) @ circuit_unitary(c)
    assert np.allclose(prod, np.eye(4))


def test_adjoint_random_circuit(rng):
    insts = []
    for _ in range(30):
        k = rng.integers(5)
        a, b = rng.choice(3, 2, replace=False)
        insts.append([u3(*rng.uniform(-3, 3, 3), a), cx(a, b), sx(a), rz(rng.uniform(-3, 3), b), cu3(*rng.uniform(-3, 3, 3), a, b)][k])
    c = Circuit(3, tuple(insts))
    assert equal_up_to_phase(circuit_unitary(adjoint(c)) @ circuit_unitary(c), np.eye(8))


def test_adjoint_rejects_non_unitary():
    with pytest.raises(CircuitError):
        adjoint(Circuit(1, (reset(0),)))


def test_depth_and_counts():
    c = Circuit(3, (h(0), cx(0, 1), barrier(0, 1, 2), rz(0.1, 2), cx(1, 2)), 0)
    assert depth(c) == 4
    assert gate_counts(c) == {"cx": 2, "h": 1, "rz": 1}
    assert depth(Circuit(2)) == 0


def test_depth_dependency_chain():
    assert depth(Circuit(2, (x(0), x(1)))) == 1
    assert depth(Circuit(2, (x(0), cx(0, 1), x(1)))) == 3


def test_adjoint_matches_dagger_on_four_qubits(rng):
    for _ in range(5):
        insts = []
        for _ in range(50):
            a, b = (int(v) for v in rng.choice(4, 2, replace=False))
            k = rng.integers(5)
            insts.append([u3(*rng.uniform(-3, 3, 3), a), cx(a, b), sx(a), ccx(a, b, min({0, 1, 2, 3} - {a, b})), cu3(*rng.uniform(-3, 3, 3), a, b)][k])
        c = Circuit(4, tuple(insts))
        u = circuit_unitary(c)
        assert equal_up_to_phase(circuit_unitary(adjoint(c)), u.conj().T, 1e-10)


def test_barrier_synchronizes_without_adding_depth():
    c = Circuit(2, (x(0), x(0), barrier(0, 1), x(1)))
    assert depth(c) == 3


def test_invalid_instructions():
    with pytest.raises(CircuitError):
        cx(1, 1)
    with pytest.raises(CircuitError):
        Circuit(2, (cx(0, 2),))
    with pytest.raises(CircuitError):
        Circuit(1, (measure(0, 0),), 0)
    with pytest.raises(CircuitError):
        rz(float("nan"), 0)


def test_normalize_angle():
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    assert normalize_angle(0.5) == 0.5


def test_coupling_map_distances():
    assert LINE3.distances()[0, 2] == 2
    assert TRIANGLE3.is_complete() and not LINE3.is_complete()
    assert CouplingMap.from_pairs(3, [(0, 1)]).is_connected() is False
    with pytest.raises(CircuitError):
        CouplingMap.from_pairs(2, [(0, 5)])


def test_validate_reports_basis_and_connectivity():
    c = Circuit(3, (h(0), cx(0, 2), rz(0.1, 1), sx(1)))
    problems = validate(c, LINE3)
    kinds = sorted(p.kind for p in problems)
    assert kinds == ["basis", "connectivity"]
    assert validate(Circuit(3, (cx(0, 1), rz(1.0, 2), sx(0))), LINE3) == []


def test_unitary_matches_einsum_oracle(rng):
    # random 3-qubit circuit checked against explicit kron-built matrices
    ops = []
    mat = np.eye(8, dtype=complex)
    for _ in range(10):
        q = int(rng.integers(3))
        t = rng.uniform(-3, 3, 3)
        ops.append(u3(*t, q))
        pieces = [I2, I2, I2]
        pieces[2 - q] = u3_matrix(*t)
        mat = kron(*pieces) @ mat
    assert np.allclose(circuit_unitary(Circuit(3, tuple(ops))), mat)

