"""Dense statevector engine.

Qubit ``q`` is bit ``q`` of the amplitude index (qubit 0 is the least
significant bit).  Rotations use the full-angle convention
``exp(-i*theta*P)``; the usual hardware gate ``RP(phi)`` equals
``exp(-i*(phi/2)*P)``, so ``RP(2*theta)`` here corresponds to ``theta``.

All gate functions mutate the state in place and return it.
"""

import math

import numpy as np
from numba import njit

from .errors import ConfigError

MAX_QUBITS = 20


# ---------------------------------------------------------------- kernels

@njit(cache=True)
def _apply_1q(amps, q, u00, u01, u10, u11):
    stride = 1 << q
    n_amps = amps.shape[0]
    for base in range(0, n_amps, 2 * stride):
        for i in range(base, base + stride):
            a0 = amps[i]
            a1 = amps[i + stride]
            amps[i] = u00 * a0 + u01 * a1
            amps[i + stride] = u10 * a0 + u11 * a1


@njit(cache=True)
def _apply_1q_all(amps, n, u00, u01, u10, u11):
    for q in range(n):
        _apply_1q(amps, q, u00, u01, u10, u11)


@njit(cache=True)
def _apply_cnot(amps, control, target):
    cmask = 1 << control
    tmask = 1 << target
    for i in range(amps.shape[0]):
        # visit each swapped pair once, from its target-bit-0 member
        if (i & cmask) and not (i & tmask):
            j = i | tmask
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


@njit(cache=True)
def _apply_z_phase(amps, q, ph0, ph1):
    mask = 1 << q
    for i in range(amps.shape[0]):
        if i & mask:
            amps[i] *= ph1
        else:
            amps[i] *= ph0


@njit(cache=True)
def _apply_zz_phase(amps, j, k, same, diff):
    for i in range(amps.shape[0]):
        if ((i >> j) ^ (i >> k)) & 1:
            amps[i] *= diff
        else:
            amps[i] *= same


def rx_matrix(theta):
    """2x2 matrix of exp(-i*theta*X)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(theta):
    """2x2 matrix of exp(-i*theta*Y)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta):
    """2x2 matrix of exp(-i*theta*Z)."""
    return np.diag([np.exp(-1j * theta), np.exp(1j * theta)])


# ---------------------------------------------------------------- state

class StateVector:
    """2**n complex amplitudes; see the module docstring for bit order."""

    __slots__ = ("n", "amps")

    def __init__(self, n, amps=None):
        _check_qubits(n)
        self.n = n
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.ascontiguousarray(amps, dtype=np.complex128)
            if amps.shape != (1 << n,):
                raise ValueError(f"expected {1 << n} amplitudes, got shape {amps.shape}")
        self.amps = amps

    @classmethod
    def basis(cls, n, index):
        s = cls(n)
        s.amps[0] = 0.0
        s.amps[index] = 1.0
        return s

    def copy(self):
        return StateVector(self.n, self.amps.copy())

    def norm(self):
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def probabilities(self):
        return self.amps.real ** 2 + self.amps.imag ** 2

    def __repr__(self):
        return f"StateVector(n={self.n})"


def _check_qubits(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ConfigError(f"qubit count must be in [1, {MAX_QUBITS}], got {n!r}")


def _check_index(s, q):
    if not 0 <= q < s.n:
        raise IndexError(f"qubit index {q} out of range for {s.n} qubits")


def _check_pair(s, a, b):
    _check_index(s, a)
    _check_index(s, b)
    if a == b:
        raise IndexError(f"two-qubit gate needs distinct qubits, got {a} twice")


def new_plus_state(n):
    """Uniform superposition H^n |0...0>."""
    _check_qubits(n)
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def apply_rx(s, q, theta):
    _check_index(s, q)
    c, sn = math.cos(theta), math.sin(theta)
    _apply_1q(s.amps, q, complex(c), -1j * sn, -1j * sn, complex(c))
    return s


def apply_ry(s, q, theta):
    _check_index(s, q)
    c, sn = math.cos(theta), math.sin(theta)
    _apply_1q(s.amps, q, complex(c), complex(-sn), complex(sn), complex(c))
    return s


def apply_z_phase(s, q, theta):
    """exp(-i*theta*Z) on qubit q."""
    _check_index(s, q)
    _apply_z_phase(s.amps, q, complex(np.exp(-1j * theta)), complex(np.exp(1j * theta)))
    return s


def apply_cnot(s, control, target):
    _check_pair(s, control, target)
    _apply_cnot(s.amps, control, target)
    return s


def apply_zz_phase(s, j, k, gamma):
    """exp(-i*gamma*Z_j Z_k), applied as a single diagonal pass."""
    _check_pair(s, j, k)
    _apply_zz_phase(s.amps, j, k, complex(np.exp(-1j * gamma)), complex(np.exp(1j * gamma)))
    return s


def apply_matrix_1q(s, q, u):
    """Apply an arbitrary 2x2 unitary to qubit q."""
    _check_index(s, q)
    u = np.asarray(u, dtype=np.complex128)
    _apply_1q(s.amps, q, u[0, 0], u[0, 1], u[1, 0], u[1, 1])
    return s
