"""Two-qubit KAK (Cartan) decomposition and minimal-CNOT synthesis.

Any ``U`` in U(4) factors as ``phase * (A1 x A0) Can(a, b, c) (B1 x B0)`` with
``Can(a, b, c) = exp(i (a XX + b YY + c ZZ))``. The coordinates are brought into
the Weyl chamber ``pi/4 >= a >= b >= |c|`` (``c >= 0`` when ``a = pi/4``), which
fixes the CNOT cost: 0 for the origin, 1 for ``(pi/4, 0, 0)``, 2 when ``c = 0``,
3 otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit, CircuitError, Instruction, cx
from .synthesis import unitary_to_basis

PI = math.pi
CLASS_TOL = 1e-7

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j])
_SDG = np.diag([1, -1j])
_PAULI = (_X, _Y, _Z)

MAGIC = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex) / math.sqrt(2)
MAGIC_DAG = MAGIC.conj().T

# rows: XX, YY, ZZ eigenvalues along the magic basis
_SIGNS = np.array([np.diag(MAGIC_DAG @ np.kron(p, p) @ MAGIC).real for p in _PAULI])


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


# Clifford conjugations that exchange two of the XX/YY/ZZ axes
_AXIS_SWAPPERS = {(0, 1): _S, (1, 2): _rx(PI / 2), (0, 2): _H}


def canonical_gate(a: float, b: float, c: float) -> np.ndarray:
    xx, yy, zz = (np.kron(p, p) for p in _PAULI)
    h = a * xx + b * yy + c * zz
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


@dataclass
class KAK:
    """``U = phase * kron(a1, a0) @ Can(coords) @ kron(b1, b0)``; ``a0``/``b0`` act on qubit 0."""

    phase: complex
    a1: np.ndarray
    a0: np.ndarray
    coords: tuple[float, float, float]
    b1: np.ndarray
    b0: np.ndarray

    def unitary(self) -> np.ndarray:
        return self.phase * np.kron(self.a1, self.a0) @ canonical_gate(*self.coords) @ np.kron(self.b1, self.b0)

    @property
    def num_cnots(self) -> int:
        return cnot_class(self.coords)

    # -- local moves that keep the product fixed --

    def _shift(self, k: int, times: int) -> None:
        """coords[k] -= times * pi/2, compensated by (i P x P)**times."""
        if times == 0:
            return
        v = list(self.coords)
        v[k] -= times * PI / 2
        self.coords = tuple(v)
        p = np.linalg.matrix_power(_PAULI[k], times % 2)
        self.phase *= 1j ** (times % 4)
        self.b1 = p @ self.b1
        self.b0 = p @ self.b0

    def _negate(self, k: int, m: int) -> None:
        """Flip the signs of coords k and m via conjugation by the third Pauli on qubit 0."""
        (other,) = {0, 1, 2} - {k, m}
        q = _PAULI[other]
        v = list(self.coords)
        v[k], v[m] = -v[k], -v[m]
        self.coords = tuple(v)
        self.a0 = self.a0 @ q
        self.b0 = q @ self.b0

    def _swap(self, k: int, m: int) -> None:
        key = (min(k, m), max(k, m))
        g = _AXIS_SWAPPERS[key]
        v = list(self.coords)
        v[k], v[m] = v[m], v[k]
        self.coords = tuple(v)
        self.a1 = self.a1 @ g
        self.a0 = self.a0 @ g
        gd = g.conj().T
        self.b1 = gd @ self.b1
        self.b0 = gd @ self.b0

    def canonicalize(self) -> KAK:
        for k in range(3):
            # into [-pi/4, pi/4)
            self._shift(k, math.floor((self.coords[k] + PI / 4) / (PI / 2)))
        # sort by magnitude, descending (three compare-exchanges)
        for k, m in ((0, 1), (1, 2), (0, 1)):
            if abs(self.coords[m]) > abs(self.coords[k]) + 1e-15:
                self._swap(k, m)
        if self.coords[0] < 0:
            self._negate(0, 2)
        if self.coords[1] < 0:
            self._negate(1, 2)
        if abs(self.coords[0] - PI / 4) < CLASS_TOL and self.coords[2] < 0:
            self._shift(0, 1)
            self._negate(0, 2)
        return self


def cnot_class(coords: tuple[float, float, float], tol: float = CLASS_TOL) -> int:
    a, b, c = coords
    if abs(c) > tol:
        return 3
    if b > tol:
        return 2
    if abs(a - PI / 4) <= tol:
        return 1
    if a <= tol:
        return 0
    return 2


def _kron_factor(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``k = kron(f1, f0)`` with ``f1`` in SU(2)."""
    r = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    f1 = u[:, 0].reshape(2, 2)
    f1 = f1 / np.sqrt(np.linalg.det(f1))
    f0 = sum(np.conj(f1[i, j]) * k[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] for i in range(2) for j in range(2)) / 2
    return f1, f0


def _real_orthogonal_diagonalizer(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real orthogonal ``p`` with ``p.T m p`` diagonal, for symmetric unitary ``m``."""
    re, im = m.real, m.imag
    rng = np.random.default_rng(12345)
    for attempt in range(20):
        r = rng.uniform(0.1, 10.0) if attempt else 1.0 / math.e
        _, p = np.linalg.eigh(re + r * im)
        d = p.T @ m @ p
        if np.allclose(d, np.diag(np.diag(d)), atol=1e-10):
            if np.linalg.det(p) < 0:
                p[:, 0] = -p[:, 0]
            return p, np.diag(d)
    raise CircuitError("failed to diagonalize the magic-basis Gram matrix")


def _check_unitary4(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4) or not np.allclose(u.conj().T @ u, np.eye(4), atol=1e-9):
        raise CircuitError("expected a 4x4 unitary")
    return u


def _decompose_once(u: np.ndarray) -> KAK:
    g0 = np.linalg.det(u) ** 0.25
    us = u / g0
    um = MAGIC_DAG @ us @ MAGIC
    p, d = _real_orthogonal_diagonalizer(um.T @ um)
    half = np.sqrt(d)
    k1 = um @ p @ np.diag(1 / half)
    if np.linalg.det(k1).real < 0:
        half[0] = -half[0]
        k1 = um @ p @ np.diag(1 / half)
    k1 = k1.real
    theta = np.angle(half)
    g = theta.mean()
    a, b, c = (_SIGNS @ theta) / 4
    left = MAGIC @ k1 @ MAGIC_DAG
    right = MAGIC @ p.T @ MAGIC_DAG
    a1, a0 = _kron_factor(left)
    b1, b0 = _kron_factor(right)
    return KAK(g0 * np.exp(1j * g), a1, a0, (a, b, c), b1, b0)


def _fidelity(u: np.ndarray, v: np.ndarray) -> float:
    return abs(np.trace(v.conj().T @ u)) / u.shape[0]


def kak(u: np.ndarray) -> KAK:
    """Canonical KAK decomposition of a 4x4 unitary (qubit 0 = low index bit)."""
    u = _check_unitary4(u)
    rng = np.random.default_rng(7)
    target = u
    for attempt in range(4):
        try:
            dec = _decompose_once(target).canonicalize()
        except (CircuitError, np.linalg.LinAlgError):
            dec = None
        if dec is not None and _fidelity(u, dec.unitary()) > 1 - 1e-10:
            return dec
        # nudge away from a degenerate spectrum and re-unitarize
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        w, _, vh = np.linalg.svd(u + 1e-13 * (attempt + 1) * h)
        target = w @ vh
    raise CircuitError("KAK decomposition failed to converge")


def weyl_coordinates(u: np.ndarray) -> tuple[float, float, float]:
    return kak(u).coords


def num_cnots(u: np.ndarray) -> int:
    return kak(u).num_cnots


# Each template is a list of local layers (q0, q1) interleaved with CX(0 -> 1):
#   layer0, CX, layer1, CX, ..., layer_k     and equals Can(a, b, c) up to phase.


def _template(k: int, a: float, b: float, c: float) -> list[tuple[np.ndarray, np.ndarray]]:
    if k == 0:
        return [(_I, _I)]
    if k == 1:
        return [(_H, _I), (_H @ _rz(-PI / 2), _rx(-PI / 2))]
    if k == 2:
        r = _rx(PI / 2)
        rd = r.conj().T
        return [(rd, rd), (_rx(-2 * a), _rz(-2 * b)), (r, r)]
    return [
        (_I, _I),
        (_rx(-2 * a), _H @ _rz(-2 * c)),
        (_rx(2 * b), _SDG @ _H),
        (_SDG, _S),
    ]


def kak_decompose(u: np.ndarray) -> Circuit:
    """Minimal-CNOT circuit over {Rz, SX, CX} equal to ``u`` up to global phase."""
    dec = kak(u)
    k = dec.num_cnots
    layers = _template(k, *dec.coords)
    layers[0] = (layers[0][0] @ dec.b0, layers[0][1] @ dec.b1)
    layers[-1] = (dec.a0 @ layers[-1][0], dec.a1 @ layers[-1][1])
    out: list[Instruction] = []
    for i, (l0, l1) in enumerate(layers):
        if i:
            out.append(cx(0, 1))
        out += unitary_to_basis(l0, 0)
        out += unitary_to_basis(l1, 1)
    return Circuit(2, tuple(out))
