"""Exact expected energy value (EEV) of a prepared state.

All problem kinds are scored in the maximisation direction (cut size for
Max-Cut, negated energy for RIM), so a better circuit always has a larger
EEV and ``eev_diff`` against the brute-force optimum is never positive.
"""

from dataclasses import dataclass

import numpy as np

from .ansatz import QAOACircuit, check_params
from .errors import InputError


def eev(s, p):
    """sum_x |amps[x]|**2 * cost(x), using the problem's cost table."""
    if s.n != p.n:
        raise InputError(f"state has {s.n} qubits, problem has {p.n} nodes")
    return float(np.dot(s.probabilities(), p.cost_table))


def eev_diff(achieved, oracle):
    """achieved - optimum; <= 0 for any achievable value."""
    return float(achieved) - oracle.opt_value


def eev_ratio(achieved, oracle):
    """achieved / optimum.  Only meaningful for positive optima (Max-Cut)."""
    if oracle.opt_value == 0:
        raise InputError("ratio undefined for a zero optimum")
    return float(achieved) / oracle.opt_value


@dataclass
class Evaluation:
    eev: float
    n_evals_consumed: int


class Objective:
    """``theta -> EEV`` for one problem and ansatz, counting every call.

    The optimisers only see this callable.  One instance owns its amplitude
    buffers, so give each concurrent trial its own.
    """

    def __init__(self, problem, spec):
        self.problem = problem
        self.spec = spec
        self.circuit = QAOACircuit(problem, spec)
        self.n_evals = 0

    @property
    def dim(self):
        return self.spec.n_params

    def __call__(self, theta):
        self.n_evals += 1
        return self.circuit.expectation(theta)

    def evaluate(self, theta):
        """Checked single evaluation, returned with the running count."""
        value = self(check_params(theta, self.spec))
        return Evaluation(value, self.n_evals)
