import math

import pytest

from qcflate.circuit import Circuit, barrier, cu3, cx, measure, reset, rz, sx
from qcflate.compression import build_compression_circuit
from qcflate.qasm import QasmError, dumps, load, dump, loads


def test_round_trip_is_exact():
    c = Circuit(3, (cx(0, 1), cu3(2 * math.acos(1 / math.sqrt(3)), math.pi, math.pi, 0, 2), rz(-0.1, 1), sx(2), barrier(0, 1, 2), reset(2), measure(1, 0)), 1)
    assert loads(dumps(c)) == c


def test_compression_circuit_round_trip(tmp_path):
    c = build_compression_circuit()
    path = tmp_path / "c.qasm"
    dump(c, path)
    assert load(path) == c
    assert dumps(load(path)) == path.read_text()


def test_comments_and_blank_lines():
    text = "# hi\nqasm2-subset\n\nqubits 2  # two\nclbits 0\ncx q[1] q[0]\n"
    c = loads(text)
    assert c.instructions == (cx(1, 0),)


@pytest.mark.parametrize("text, line", [
    ("qubits 2\n", 1),
    ("qasm2-subset\nqubits 2\nclbits 0\nfoo q[0]\n", 4),
    ("qasm2-subset\nqubits 2\nclbits 0\ncx q[0]\n", 4),
    ("qasm2-subset\nqubits 2\nclbits 0\nrz q[0]\n", 4),
    ("qasm2-subset\nqubits 2\nclbits 0\nrz q[0] (abc)\n", 4),
    ("qasm2-subset\nqubits 2\nclbits 0\ncx q[0] q[5]\n", 4),
    ("qasm2-subset\nqubits 2\nclbits 0\nmeasure q[0]\n", 4),
    ("qasm2-subset\nqubits 2\nclbits 1\n\nsx q[0] -> c[0]\n", 5),
    ("qasm2-subset\nqubits x\nclbits 0\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(QasmError) as info:
        loads(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_empty_circuit():
    c = loads("qasm2-subset\nqubits 3\nclbits 0\n")
    assert c == Circuit(3)
