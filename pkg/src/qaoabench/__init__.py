"""Exact-statevector QAOA benchmark: SHC-RR against local search on Max-Cut and RIM."""

from .ansatz import MODEL_LABELS, AnsatzSpec, QAOACircuit, prepare_state
from .errors import BenchError, ConfigError, InputError, OutputError
from .objective import Objective, eev, eev_diff
from .optimizers import Budget, OptRun, local_search, rng_stream, shc_inner, shc_rr
from .problems import (ProblemInstance, brute_force_optimum, cost_of_bitstring, gen_rim,
                       make_complete_maxcut, make_cyclic_maxcut)
from .statevector import StateVector, new_plus_state

__version__ = "0.1.0"
