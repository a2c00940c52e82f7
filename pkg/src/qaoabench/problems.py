"""Max-Cut and random-field Ising (RIM) instances, classical costs, exact optima.

Every problem kind is canonicalised to *maximisation*: Max-Cut scores a
bitstring by its cut size, RIM by the negated Ising energy

    E(x) = sum_{(j,k) in edges} z_j z_k + sum_j h_j z_j,   z_i = 1 - 2 x_i.

Bitstrings are written node-first: character ``i`` of ``"0101"`` is the bit
of node ``i``, which is bit ``i`` of the basis index.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError

MAXCUT_CYCLIC = "maxcut_cyclic"
MAXCUT_COMPLETE = "maxcut_complete"
RIM = "rim"
KINDS = (MAXCUT_CYCLIC, MAXCUT_COMPLETE, RIM)

RIM_MIN_NODES = 5
RIM_MAX_NODES = 15
ORACLE_MAX_NODES = 20


@dataclass(frozen=True)
class ProblemInstance:
    kind: str
    n: int
    edges: tuple
    fields: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown problem kind {self.kind!r}")
        if self.n < 1:
            raise ConfigError(f"node count must be positive, got {self.n}")
        edges = tuple(sorted((int(min(e)), int(max(e))) for e in self.edges))
        for j, k in edges:
            if j == k or j < 0 or k >= self.n:
                raise InputError(f"invalid edge ({j}, {k}) for n={self.n}")
        if len(set(edges)) != len(edges):
            raise InputError("duplicate edge in edge list")
        fields = tuple(float(h) for h in self.fields) if len(self.fields) else (0.0,) * self.n
        if len(fields) != self.n:
            raise InputError(f"expected {self.n} fields, got {len(fields)}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "fields", fields)

        if self.kind == MAXCUT_CYCLIC and set(edges) != set(_ring(self.n)):
            raise InputError("cyclic Max-Cut edges must form the ring 0-1-...-(n-1)-0")
        if self.kind == MAXCUT_COMPLETE and len(edges) != self.n * (self.n - 1) // 2:
            raise InputError("complete Max-Cut must contain every pair of nodes")
        if self.kind != RIM and any(fields):
            raise InputError("Max-Cut instances carry no fields")
        if self.kind == RIM:
            if not set(_path(self.n)) <= set(edges):
                raise InputError("RIM edges must contain the backbone path")
            if any(abs(h) > 1.0 for h in fields):
                raise InputError("RIM fields must lie in [-1, 1]")

    @property
    def is_maxcut(self):
        return self.kind != RIM

    @cached_property
    def _spins(self):
        idx = np.arange(1 << self.n, dtype=np.int64)
        return [1 - 2 * ((idx >> q) & 1) for q in range(self.n)]

    @cached_property
    def energy_diagonal(self):
        """Diagonal of sum Z_j Z_k + sum h_j Z_j over all basis states.

        This is the Hamiltonian the phase operator exponentiates.
        """
        z = self._spins
        diag = np.zeros(1 << self.n)
        for j, k in self.edges:
            diag += z[j] * z[k]
        if self.kind == RIM:
            for j, h in enumerate(self.fields):
                diag += h * z[j]
        diag.setflags(write=False)
        return diag

    @cached_property
    def cost_table(self):
        """Objective value of every basis index (read-only)."""
        if self.is_maxcut:
            idx = np.arange(1 << self.n, dtype=np.int64)
            table = np.zeros(1 << self.n)
            for j, k in self.edges:
                table += ((idx >> j) ^ (idx >> k)) & 1
        else:
            table = -self.energy_diagonal
        table = np.ascontiguousarray(table, dtype=np.float64)
        table.setflags(write=False)
        return table

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "fields": list(self.fields),
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["kind"], int(d["n"]), tuple(tuple(e) for e in d["edges"]), tuple(d["fields"]))
        except KeyError as exc:
            raise InputError(f"instance record missing key {exc}") from None


@dataclass(frozen=True)
class OracleResult:
    opt_value: float
    argmax: list


def _ring(n):
    return [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]


def _path(n):
    return [(i, i + 1) for i in range(n - 1)]


def make_cyclic_maxcut(n):
    if n < 3:
        raise ConfigError(f"a cycle needs at least 3 nodes, got {n}")
    return ProblemInstance(MAXCUT_CYCLIC, n, tuple(_ring(n)))


def make_complete_maxcut(n):
    if n < 2:
        raise ConfigError(f"a complete graph needs at least 2 nodes, got {n}")
    edges = tuple((j, k) for j in range(n) for k in range(j + 1, n))
    return ProblemInstance(MAXCUT_COMPLETE, n, edges)


def gen_rim(seed, n):
    """Random-field Ising instance on ``n`` particles.

    Backbone path (i, i+1), plus ``m ~ U{1..n}`` distinct extra edges drawn
    from the non-backbone pairs, plus fields ``h_j ~ U(-1, 1)``.  ``seed`` is
    anything :func:`numpy.random.default_rng` accepts (an int or a tuple of
    ints); draws happen in that order so instances are reproducible.
    """
    if not RIM_MIN_NODES <= n <= RIM_MAX_NODES:
        raise ConfigError(f"RIM node count must be in [{RIM_MIN_NODES}, {RIM_MAX_NODES}], got {n}")
    rng = np.random.default_rng(seed)
    backbone = _path(n)
    extra_pool = [(j, k) for j in range(n) for k in range(j + 2, n)]
    m = int(rng.integers(1, n + 1))
    picks = rng.choice(len(extra_pool), size=m, replace=False)
    fields = rng.uniform(-1.0, 1.0, size=n)
    edges = backbone + [extra_pool[i] for i in picks]
    return ProblemInstance(RIM, n, tuple(edges), tuple(fields))


def bitstring_to_index(x):
    return sum(int(b) << i for i, b in enumerate(x))


def index_to_bitstring(index, n):
    return "".join(str((index >> i) & 1) for i in range(n))


def cost_of_bitstring(p, x):
    """Cut size (Max-Cut) or negated energy (RIM) of bitstring ``x``."""
    bits = [int(b) for b in x]
    if len(bits) != p.n or any(b not in (0, 1) for b in bits):
        raise InputError(f"expected a {p.n}-bit string, got {x!r}")
    if p.is_maxcut:
        return float(sum(bits[j] != bits[k] for j, k in p.edges))
    z = [1 - 2 * b for b in bits]
    energy = sum(z[j] * z[k] for j, k in p.edges) + sum(h * zj for h, zj in zip(p.fields, z))
    return -energy


def brute_force_optimum(p):
    """Exhaustive scan of all 2**n bitstrings."""
    if p.n > ORACLE_MAX_NODES:
        raise ConfigError(f"refusing to enumerate 2**{p.n} bitstrings (limit n={ORACLE_MAX_NODES})")
    table = p.cost_table
    best = table.max()
    winners = np.flatnonzero(table == best)
    return OracleResult(float(best), [index_to_bitstring(int(i), p.n) for i in winners])


def make_problem(kind, n, seed=None):
    """Build an instance from CLI-style names ("cyclic", "complete", "rim")."""
    kind = {"cyclic": MAXCUT_CYCLIC, "complete": MAXCUT_COMPLETE}.get(kind, kind)
    if kind == MAXCUT_CYCLIC:
        return make_cyclic_maxcut(n)
    if kind == MAXCUT_COMPLETE:
        return make_complete_maxcut(n)
    if kind == RIM:
        return gen_rim(seed, n)
    raise ConfigError(f"unknown problem kind {kind!r}")


def save_instance(p, path):
    path = Path(path)
    path.write_text(json.dumps(p.to_dict()) + "\n", encoding="utf-8")
    return path


def load_instance(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not a valid instance file ({exc})") from None
    return ProblemInstance.from_dict(data)
