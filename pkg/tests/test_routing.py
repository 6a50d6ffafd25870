import numpy as np
import pytest

from conftest import equal_up_to_phase
from qcflate.circuit import LINE3, TRIANGLE3, Circuit, CircuitError, CouplingMap, circuit_unitary, count_cx, cx, rz, sx, validate
from qcflate.transpiler.routing import LayoutPermutation, permutation_matrix, route


def test_permutation_matrix_moves_qubits():
    p = permutation_matrix((2, 0, 1))  # logical 0 -> physical 2
    assert p[4, 1] == 1  # |001> -> |100>
    assert np.allclose(p.T @ p, np.eye(8))


def test_layout_composition():
    a = LayoutPermutation((0, 1, 2), (1, 0, 2))
    b = LayoutPermutation((2, 1, 0), (2, 0, 1))
    c = a.then(b)
    assert c.initial == (2, 1, 0) and c.final == (0, 2, 1)
    with pytest.raises(CircuitError):
        LayoutPermutation((0, 0), (0, 1))


def test_triangle_needs_no_swaps():
    c = Circuit(3, (cx(0, 1), cx(1, 2), cx(0, 2)))
    out, layout = route(c, TRIANGLE3, seed=3)
    assert count_cx(out) == 3


def _routed_equals(c, out, layout):
    v = permutation_matrix(layout.final).T @ circuit_unitary(out) @ permutation_matrix(layout.initial)
    return equal_up_to_phase(v, circuit_unitary(c), 1e-10)


def test_line_routing_is_valid_and_correct():
    c = Circuit(3, (cx(0, 1), cx(1, 2), cx(0, 2), sx(0), cx(2, 0), rz(0.3, 1), cx(0, 1)))
    for seed in range(10):
        out, layout = route(c, LINE3, seed=seed)
        assert validate(out, LINE3) == []
        assert _routed_equals(c, out, layout)


def test_fixed_initial_layout_is_respected():
    c = Circuit(3, (cx(0, 1),))
    out, layout = route(c, LINE3, seed=0, initial_layout=(1, 0, 2))
    assert layout.initial == (1, 0, 2)
    assert out.instructions[0].qubits == (1, 0)


def test_seeded_routing_is_deterministic():
    c = Circuit(3, (cx(0, 2), cx(2, 1), cx(0, 1), cx(0, 2)))
    assert route(c, LINE3, seed=11) == route(c, LINE3, seed=11)


def test_route_pads_to_device_width():
    out, layout = route(Circuit(2, (cx(0, 1),)), LINE3, seed=0)
    assert out.num_qubits == 3 and len(layout.initial) == 3


def test_route_errors():
    with pytest.raises(CircuitError):
        route(Circuit(4), LINE3)
    with pytest.raises(CircuitError):
        route(Circuit(3, (cx(0, 1),)), CouplingMap.from_pairs(3, [(0, 1)]))


def test_edge_error_prefers_better_edge():
    c = Circuit(2, (cx(0, 1),) * 3)
    errs = {frozenset((0, 1)): 0.5, frozenset((1, 2)): 0.01}
    out, layout = route(c, LINE3, seed=0, edge_error=lambda a, b: errs[frozenset((a, b))])
    assert {tuple(sorted(i.qubits)) for i in out.instructions} == {(1, 2)}
