"""Layered QAOA circuit: phase operator followed by an RX/RY mixer, p times.

Two execution paths produce the same state:

* :func:`circuit_ops` + :func:`run_ops` spell the circuit out gate by gate
  (ZZ phases edge by edge, field phases, RX column, CNOT ladder, RY column)
  on the public :mod:`~qaoabench.statevector` gates.  This is the reference.
* :class:`QAOACircuit` runs the whole circuit in one compiled call.  The phase
  operator becomes one diagonal multiply, the non-entangled mixer one fused
  ``RY @ RX`` pass per qubit, and the CNOT ladder one precomputed basis
  permutation (a gather).  Optimisers call this path hundreds of thousands of times.

Both mixers use ``exp(-i*beta*P)`` rotations.  The entangled mixer is
sometimes written with ``exp(+i*beta*P)``; that is the same family under
``beta -> -beta`` and makes no difference to an optimiser.
"""

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from . import _fused
from . import statevector as sv
from .errors import ConfigError, InputError
from .statevector import StateVector, new_plus_state

MAX_LAYERS = 3


@dataclass(frozen=True)
class AnsatzSpec:
    layers: int
    entangled: bool = False

    def __post_init__(self):
        if not 1 <= self.layers <= MAX_LAYERS:
            raise ConfigError(f"layers must be in [1, {MAX_LAYERS}], got {self.layers}")

    @property
    def n_params(self):
        return 3 * self.layers

    @property
    def label(self):
        """Table label: "3p", "3p ent", "6p", ..."""
        return f"{self.n_params}p" + (" ent" if self.entangled else "")

    @property
    def slug(self):
        return self.label.replace(" ", "-")

    @classmethod
    def from_label(cls, label):
        m = re.fullmatch(r"\s*(\d+)p(?:[\s_-]*(ent))?\s*", label)
        if not m or int(m.group(1)) % 3:
            raise ConfigError(f"unrecognised model label {label!r}")
        return cls(int(m.group(1)) // 3, bool(m.group(2)))


MODEL_ORDER = tuple(AnsatzSpec(p, e) for p in (1, 2, 3) for e in (False, True))
MODEL_LABELS = tuple(s.label for s in MODEL_ORDER)


def check_params(theta, spec):
    """Validate and return the parameter vector [g1, b1_1, b2_1, g2, ...]."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (spec.n_params,):
        raise InputError(f"{spec.label} takes {spec.n_params} parameters, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise InputError("parameters must be finite")
    return theta


# ------------------------------------------------------------ permutations

@lru_cache(maxsize=32)
def cnot_ladder_permutation(n):
    """Basis map of CNOT(0,1), CNOT(0,2), ..., CNOT(n-2,n-1) applied in order.

    ``dest[x]`` is the index that basis state ``x`` is sent to.
    """
    dest = np.arange(1 << n, dtype=np.int64)
    for c in range(n):
        for t in range(c + 1, n):
            dest ^= ((dest >> c) & 1) << t
    dest.setflags(write=False)
    return dest


def _zz_levels(problem):
    """Distinct values of sum Z_j Z_k and the level of every basis index."""
    idx = np.arange(1 << problem.n, dtype=np.int64)
    cut = np.zeros(1 << problem.n, dtype=np.int64)
    for j, k in problem.edges:
        cut += ((idx >> j) ^ (idx >> k)) & 1
    levels, index = np.unique(len(problem.edges) - 2 * cut, return_inverse=True)
    return levels.astype(np.float64), index.astype(np.int64).ravel()


def _phase_levels(problem):
    # Max-Cut energies are integers, so the diagonal usually has few distinct
    # values; exponentiate those once per layer and gather.
    levels, index = np.unique(problem.energy_diagonal, return_inverse=True)
    return levels, index.astype(np.int64).ravel()


# ------------------------------------------------------------ kernels

@njit(cache=True)
def _diag_phase(amps, levels, level_index, gamma):
    phases = np.exp(-1j * gamma * levels)
    for x in range(amps.shape[0]):
        amps[x] *= phases[level_index[x]]


@njit(cache=True)
def _rotate_all(amps, n, u00, u01, u10, u11):
    half = amps.shape[0] >> 1
    for q in range(n):
        stride = 1 << q
        low = stride - 1
        for i in range(half):
            i0 = ((i >> q) << (q + 1)) | (i & low)
            i1 = i0 | stride
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = u00 * a0 + u01 * a1
            amps[i1] = u10 * a0 + u11 * a1


@njit(cache=True)
def _permute(amps, scratch, dest):
    for x in range(amps.shape[0]):
        scratch[dest[x]] = amps[x]
    amps[:] = scratch


@njit(cache=True)
def _mixer(amps, n, b1, b2):
    c1, s1 = math.cos(b1), math.sin(b1)
    c2, s2 = math.cos(b2), math.sin(b2)
    # RY(b2) @ RX(b1), one pass per qubit
    _rotate_all(amps, n,
                complex(c2 * c1, s2 * s1), complex(-s2 * c1, -c2 * s1),
                complex(s2 * c1, -c2 * s1), complex(c2 * c1, -s2 * s1))


@njit(cache=True)
def _entangled_mixer(amps, scratch, n, dest, b1, b2):
    c1, s1 = math.cos(b1), math.sin(b1)
    c2, s2 = math.cos(b2), math.sin(b2)
    _rotate_all(amps, n, complex(c1, 0.0), complex(0.0, -s1), complex(0.0, -s1), complex(c1, 0.0))
    _permute(amps, scratch, dest)
    _rotate_all(amps, n, complex(c2, 0.0), complex(-s2, 0.0), complex(s2, 0.0), complex(c2, 0.0))


# ------------------------------------------------------------ operators

def apply_phase_operator(s, p, gamma):
    """exp(-i*gamma*H_P): every edge's ZZ phase, plus field phases for RIM."""
    if s.n != p.n:
        raise InputError(f"state has {s.n} qubits, problem has {p.n} nodes")
    levels, index = _phase_levels(p)
    _diag_phase(s.amps, levels, index, float(gamma))
    return s


def apply_mixer(s, beta1, beta2):
    """RX(beta1) on every qubit, then RY(beta2) on every qubit."""
    _mixer(s.amps, s.n, float(beta1), float(beta2))
    return s


def apply_entangled_mixer(s, beta1, beta2):
    """RX column, CNOT(j, k) for all j < k in lexicographic order, RY column."""
    if s.n < 2:
        raise ConfigError("the entangled mixer needs at least 2 qubits")
    scratch = np.empty_like(s.amps)
    _entangled_mixer(s.amps, scratch, s.n, cnot_ladder_permutation(s.n), float(beta1), float(beta2))
    return s


class QAOACircuit:
    """A problem bound to an ansatz, with all per-instance tables precomputed.

    Not safe to share across threads: the amplitude buffers are reused.
    """

    def __init__(self, problem, spec):
        if spec.entangled and problem.n < 2:
            raise ConfigError("the entangled mixer needs at least 2 qubits")
        self.problem = problem
        self.spec = spec
        self.n = problem.n
        self._k = _fused.low_block(self.n)
        self._levels, self._level_index = _zz_levels(problem)
        self._fields = np.array(problem.fields if not problem.is_maxcut else (), dtype=np.float64)
        if spec.entangled:
            self._src = _fused.gather_index(cnot_ladder_permutation(self.n), self.n, self._k)
        else:
            self._src = np.arange(1, dtype=np.int64)
        size = 1 << self.n
        self._re, self._im = np.empty(size), np.empty(size)
        self._tre, self._tim = np.empty(size), np.empty(size)
        self._table = problem.cost_table

    def _run(self, theta):
        _fused.evolve(self._re, self._im, self._tre, self._tim, self.n, self._k,
                      self._levels, self._level_index, self._fields, self._src, theta, self.spec.entangled)

    def state(self, theta):
        self._run(check_params(theta, self.spec))
        return StateVector(self.n, self._re + 1j * self._im)

    def expectation(self, theta):
        """EEV of the prepared state; skips validation for speed."""
        self._run(np.asarray(theta, dtype=np.float64))
        return _fused.expectation(self._re, self._im, self._table)


def prepare_state(p, spec, theta):
    return QAOACircuit(p, spec).state(theta)


# ------------------------------------------------------------ gate list

def circuit_ops(p, spec):
    """The circuit as an explicit gate list.

    Each entry is ``(name, qubits, param_slot, scale)``; the gate angle is
    ``theta[param_slot] * scale``, or no angle when ``param_slot`` is None.
    The initial Hadamard column is implied.
    """
    if spec.entangled and p.n < 2:
        raise ConfigError("the entangled mixer needs at least 2 qubits")
    ops = []
    for layer in range(spec.layers):
        g, b1, b2 = 3 * layer, 3 * layer + 1, 3 * layer + 2
        ops += [("zz", (j, k), g, 1.0) for j, k in p.edges]
        if not p.is_maxcut:
            ops += [("z", (j,), g, h) for j, h in enumerate(p.fields)]
        ops += [("rx", (q,), b1, 1.0) for q in range(p.n)]
        if spec.entangled:
            ops += [("cnot", (j, k), None, 0.0) for j in range(p.n) for k in range(j + 1, p.n)]
        ops += [("ry", (q,), b2, 1.0) for q in range(p.n)]
    return ops


_GATES = {
    "zz": sv.apply_zz_phase,
    "z": sv.apply_z_phase,
    "rx": sv.apply_rx,
    "ry": sv.apply_ry,
}


def run_ops(ops, n, theta):
    """Execute a :func:`circuit_ops` list gate by gate from the plus state."""
    s = new_plus_state(n)
    for name, qubits, slot, scale in ops:
        if name == "cnot":
            sv.apply_cnot(s, *qubits)
        else:
            _GATES[name](s, *qubits, theta[slot] * scale)
    return s
