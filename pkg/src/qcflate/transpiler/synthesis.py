"""One-qubit Euler synthesis and the fixed templates used to lower
controlled gates and the Toffoli into {Rz, SX, CX}.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..circuit import CircuitError, Circuit, Instruction, cx, normalize_angle, rz, sx, u3_matrix

PI = math.pi


def _check_unitary(u: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape[0] != u.shape[1] or not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol):
        raise CircuitError("matrix is not unitary")
    return u


def ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return ``(theta, phi, lam, phase)`` with ``u = exp(i*phase) * U3(theta, phi, lam)``.

    ``theta`` lies in [0, pi]; the remaining angles are normalized into (-pi, pi].
    When ``theta`` is 0 (or pi) only ``phi + lam`` (or ``phi - lam``) is
    determined, and ``phi`` (or ``lam``) is set to zero.
    """
    u = _check_unitary(u)
    a, b, c, d = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    theta = 2 * math.atan2(abs(c), abs(a))
    tiny = 1e-14
    if abs(a) >= abs(c):
        phase = cmath.phase(a)
        total = cmath.phase(d) - phase
        phi = cmath.phase(c) - phase if abs(c) > tiny else 0.0
        lam = total - phi
    else:
        if abs(a) > tiny:
            phase = cmath.phase(a)
            phi = cmath.phase(c) - phase
            lam = cmath.phase(-b) - phase
        else:
            phase = cmath.phase(-b)
            lam = 0.0
            phi = cmath.phase(c) - phase
    return theta, normalize_angle(phi), normalize_angle(lam), normalize_angle(phase)


def _is_zero_angle(theta: float, atol: float) -> bool:
    return abs(normalize_angle(theta)) < atol


def _rz_unless_trivial(theta: float, q: int, atol: float) -> list[Instruction]:
    if _is_zero_angle(theta, atol):
        return []
    return [rz(normalize_angle(theta), q)]


def decompose_u3_to_basis(theta: float, phi: float, lam: float, qubit: int = 0, atol: float = 1e-10) -> list[Instruction]:
    """Lower ``U3(theta, phi, lam)`` to Rz/SX, equal up to global phase.

    Uses the template ``Rz(phi+pi) SX Rz(theta+pi) SX Rz(lam)`` (rightmost first),
    with the single-Rz form for theta = 0 and the single-SX form for
    theta = pi/2. Rz gates whose angle is a multiple of 2*pi are dropped.
    """
    theta, phi, lam, _ = zyz_angles(u3_matrix(theta, phi, lam))
    if theta < atol:
        return _rz_unless_trivial(phi + lam, qubit, atol)
    if abs(theta - PI / 2) < atol:
        return (
            _rz_unless_trivial(lam - PI / 2, qubit, atol)
            + [sx(qubit)]
            + _rz_unless_trivial(phi + PI / 2, qubit, atol)
        )
    return (
        _rz_unless_trivial(lam, qubit, atol)
        + [sx(qubit)]
        + _rz_unless_trivial(theta + PI, qubit, atol)
        + [sx(qubit)]
        + _rz_unless_trivial(phi + PI, qubit, atol)
    )


def unitary_to_basis(u: np.ndarray, qubit: int = 0, atol: float = 1e-10) -> list[Instruction]:
    theta, phi, lam, _ = zyz_angles(u)
    return decompose_u3_to_basis(theta, phi, lam, qubit, atol)


def is_reflection(u: np.ndarray, atol: float = 1e-7) -> bool:
    """True when ``u`` has eigenvalues ``{e^{ia}, -e^{ia}}``, i.e. is a phased Pauli axis."""
    special = u / cmath.sqrt(np.linalg.det(u))
    return abs(np.trace(special)) < atol


def controlled_u_instructions(u: np.ndarray, control: int, target: int) -> list[Instruction]:
    """Controlled-``u`` over {Rz, SX, CX}: none for phases, one CX for reflections, else two."""
    u = _check_unitary(u)
    root = cmath.sqrt(np.linalg.det(u))
    special = u / root
    if abs(abs(np.trace(special)) - 2) < 1e-12:
        # u = e^{i alpha} I: a phase on the control
        return _rz_unless_trivial(cmath.phase(u[0, 0]), control, 1e-10)
    if abs(np.trace(special)) < 1e-7:
        # special = -i n.sigma, so u = e^{i alpha} n.sigma
        alpha = cmath.phase(-1j * root)
        m = 1j * special
        nz = float(np.clip(m[0, 0].real, -1.0, 1.0))
        nx, ny = m[1, 0].real, m[1, 0].imag
        polar = math.acos(nz)
        azimuth = math.atan2(ny, nx)
        # rotates the x axis onto n, so that a X a^dagger = n.sigma
        a = _rz(azimuth) @ ry_matrix(polar - PI / 2)
        return (
            unitary_to_basis(a.conj().T, target)
            + [cx(control, target)]
            + unitary_to_basis(a, target)
            + _rz_unless_trivial(alpha, control, 1e-10)
        )
    theta, phi, lam, phase = zyz_angles(u)
    alpha = phase + (phi + lam) / 2
    beta, gamma, delta = phi, theta, lam
    a = _rz(beta) @ ry_matrix(gamma / 2)
    b = ry_matrix(-gamma / 2) @ _rz(-(delta + beta) / 2)
    c = _rz((delta - beta) / 2)
    return (
        unitary_to_basis(c, target)
        + [cx(control, target)]
        + unitary_to_basis(b, target)
        + [cx(control, target)]
        + unitary_to_basis(a, target)
        + _rz_unless_trivial(alpha, control, 1e-10)
    )


def _rz(theta: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * theta), cmath.exp(0.5j * theta)])


def decompose_controlled_u(u: np.ndarray) -> Circuit:
    """Two-qubit circuit (control 0, target 1) equal to controlled-``u`` up to phase."""
    return Circuit(2, tuple(controlled_u_instructions(u, 0, 1)))


def _h(q: int) -> list[Instruction]:
    return [rz(PI / 2, q), sx(q), rz(PI / 2, q)]


def toffoli_instructions(c1: int, c2: int, target: int) -> list[Instruction]:
    """Six-CX Toffoli. The first CX comes from ``c1``; the trailing pair acts c2 -> c1."""
    t, p4 = target, PI / 4
    return [
        *_h(t),
        cx(c1, t),
        rz(-p4, t),
        cx(c2, t),
        rz(p4, t),
        cx(c1, t),
        rz(-p4, t),
        cx(c2, t),
        rz(p4, c1),
        rz(p4, t),
        *_h(t),
        cx(c2, c1),
        rz(p4, c2),
        rz(-p4, c1),
        cx(c2, c1),
    ]


def decompose_toffoli() -> Circuit:
    """CCX with controls 0, 1 and target 2."""
    return Circuit(3, tuple(toffoli_instructions(0, 1, 2)))
