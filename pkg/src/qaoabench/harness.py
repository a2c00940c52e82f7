"""Experiment runner: trials, raw trial files, summary tables, RIM campaigns.

Raw trial file (one per config, UTF-8 CSV)::

    config_id,trial,best_eev,evals,duration_ms,param_0,...,param_{3p-1}

Rows are always written in trial order and flushed one at a time, so a file
cut short by a crash is a clean prefix (plus at most one partial line, which
is discarded on resume).  Floats are written with ``repr`` so a resumed run
reproduces the exact values of an uninterrupted one; only ``duration_ms``
differs between runs.

Trial ``t`` of a config draws from ``rng_stream(seed, config_id, t)``, so
results do not depend on how many workers ran or in which order trials
finished.
"""

import csv
import io
import json
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import MODEL_LABELS, AnsatzSpec
from .errors import ConfigError, InputError, OutputError
from .objective import Objective, eev_diff
from .optimizers import OPTIMIZERS, Budget, rng_stream, run_optimizer
from .problems import RIM, brute_force_optimum, gen_rim

RAW_FIELDS = ("config_id", "trial", "best_eev", "evals", "duration_ms")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: object  # ProblemInstance
    spec: AnsatzSpec
    optimizer: str = "shc_rr"
    budget: Budget = field(default_factory=Budget)
    trials: int = 100
    seed: int = 0
    out: object = None  # raw trial file, or None to keep results in memory

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}; expected one of {', '.join(OPTIMIZERS)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.spec.entangled and self.problem.n < 2:
            raise ConfigError("the entangled mixer needs at least 2 qubits")

    @property
    def config_id(self):
        return ".".join((problem_tag(self.problem), self.spec.slug, self.optimizer,
                         f"{self.budget.outer}x{self.budget.inner}"))


def problem_tag(p):
    """Short identifier; RIM instances also carry a checksum of their contents."""
    if p.kind != RIM:
        return f"{p.kind}-n{p.n}"
    digest = zlib.crc32(json.dumps(p.to_dict(), sort_keys=True).encode("utf-8"))
    return f"rim-n{p.n}-{digest:08x}"


def model_of(config_id):
    """Table label ("6p ent") of a config id."""
    try:
        return AnsatzSpec.from_label(config_id.split(".")[1]).label
    except (IndexError, ConfigError):
        raise InputError(f"cannot read a model from config id {config_id!r}") from None


@dataclass(frozen=True)
class TrialRecord:
    config_id: str
    trial: int
    best_eev: float
    evals: int
    duration_ms: float
    best_params: tuple

    def same_result(self, other):
        """Equal in everything but wall-clock time."""
        return (self.config_id, self.trial, self.best_eev, self.evals, self.best_params) == (
            other.config_id, other.trial, other.best_eev, other.evals, other.best_params)

    def to_row(self):
        return [self.config_id, str(self.trial), repr(self.best_eev), str(self.evals),
                f"{self.duration_ms:.3f}"] + [repr(x) for x in self.best_params]

    @classmethod
    def from_row(cls, row):
        try:
            return cls(row[0], int(row[1]), float(row[2]), int(row[3]), float(row[4]),
                       tuple(float(x) for x in row[5:]))
        except (IndexError, ValueError):
            raise InputError(f"malformed trial row {row!r}") from None


@dataclass(frozen=True)
class SummaryRow:
    model: str
    best: float
    mean: float
    var: float


@dataclass(frozen=True)
class RimSummaryRow:
    model: str
    mean_diff: float


@dataclass(frozen=True)
class RimCell:
    instance: int
    model: str
    best_eev: float
    opt_value: float
    diff: float


# ------------------------------------------------------------ trials

def run_trial(cfg, trial):
    """One optimisation run; returns (TrialRecord, best-so-far trace)."""
    objective = Objective(cfg.problem, cfg.spec)
    rng = rng_stream(cfg.seed, cfg.config_id, trial)
    t0 = time.perf_counter()
    res = run_optimizer(cfg.optimizer, objective, objective.dim, cfg.budget, rng)
    ms = (time.perf_counter() - t0) * 1e3
    rec = TrialRecord(cfg.config_id, trial, float(res.best_value), res.evals, ms,
                      tuple(float(x) for x in res.best_params))
    return rec, res.trace


def _header(dim):
    return list(RAW_FIELDS) + [f"param_{i}" for i in range(dim)]


def read_trials(path):
    """Records in a raw trial file.  A trailing partial line is ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"{path}: cannot read ({exc.strerror})") from None
    return _parse_trials(text, path)[0]


def _parse_trials(text, path):
    complete = text[:text.rfind("\n") + 1]
    rows = list(csv.reader(io.StringIO(complete)))
    if not rows:
        return [], complete
    header = rows[0]
    if header[:len(RAW_FIELDS)] != list(RAW_FIELDS):
        raise InputError(f"{path}: not a raw trial file (header {header!r})")
    records = [TrialRecord.from_row(r) for r in rows[1:] if r]
    for r in records:
        if len(r.best_params) != len(header) - len(RAW_FIELDS):
            raise InputError(f"{path}: trial {r.trial} has {len(r.best_params)} parameters")
    return records, complete


def _open_for_resume(cfg):
    """Open cfg.out for appending; return (file, already-completed records)."""
    path = Path(cfg.out)
    done = []
    if path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"{path}: cannot read ({exc.strerror})") from None
        done, complete = _parse_trials(text, path)
        for r in done:
            if r.config_id != cfg.config_id:
                raise InputError(f"{path}: holds results for {r.config_id}, not {cfg.config_id}")
            if len(r.best_params) != cfg.spec.n_params:
                raise InputError(f"{path}: parameter count does not match {cfg.spec.label}")
        if complete != text:
            # drop the partial line left by an interrupted write
            try:
                path.write_text(complete, encoding="utf-8")
            except OSError as exc:
                raise OutputError(f"{path}: cannot write ({exc.strerror})") from None
    try:
        fh = path.open("a", encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(f"{path}: cannot write ({exc.strerror})") from None
    if fh.tell() == 0:
        csv.writer(fh, lineterminator="\n").writerow(_header(cfg.spec.n_params))
        fh.flush()
    return fh, done


def _open_traces(path):
    try:
        fh = Path(path).open("a", encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(f"{path}: cannot write ({exc.strerror})") from None
    if fh.tell() == 0:
        csv.writer(fh, lineterminator="\n").writerow(["config_id", "trial", "outer", "best_so_far"])
    return fh


def run_experiment(cfg, jobs=1, dump_traces=None):
    """Run (or finish) every trial of ``cfg``; returns records in trial order.

    With ``cfg.out`` set, trials already in that file are kept and only the
    missing ones run.  Output files are opened before any work starts.
    """
    fh, done = (None, [])
    if cfg.out is not None:
        fh, done = _open_for_resume(cfg)
    tfh = _open_traces(dump_traces) if dump_traces is not None else None
    have = {r.trial: r for r in done if r.trial < cfg.trials}
    todo = [t for t in range(cfg.trials) if t not in have]
    results = dict(have)

    def emit(rec, trace):
        results[rec.trial] = rec
        if fh is not None:
            csv.writer(fh, lineterminator="\n").writerow(rec.to_row())
            fh.flush()
        if tfh is not None:
            w = csv.writer(tfh, lineterminator="\n")
            for i, v in enumerate(trace):
                w.writerow([rec.config_id, rec.trial, i, repr(float(v))])
            tfh.flush()

    try:
        if jobs <= 1 or len(todo) <= 1:
            for t in todo:
                emit(*run_trial(cfg, t))
        else:
            # completions arrive in any order; hold them until their turn
            pending, nxt = {}, 0
            with ProcessPoolExecutor(max_workers=min(jobs, len(todo))) as pool:
                futures = [pool.submit(run_trial, cfg, t) for t in todo]
                for fut in as_completed(futures):
                    rec, trace = fut.result()
                    pending[rec.trial] = (rec, trace)
                    while nxt < len(todo) and todo[nxt] in pending:
                        emit(*pending.pop(todo[nxt]))
                        nxt += 1
    finally:
        if fh is not None:
            fh.close()
        if tfh is not None:
            tfh.close()
    return [results[t] for t in range(cfg.trials)]


# ------------------------------------------------------------ summaries

def summarize(records, model=None):
    """Best, mean and population variance (divide by N) of best_eev."""
    if not records:
        raise InputError("cannot summarise an empty set of trials")
    ids = {r.config_id for r in records}
    if len(ids) > 1:
        raise InputError(f"records mix configs: {sorted(ids)}")
    values = np.array([r.best_eev for r in records])
    return SummaryRow(model or model_of(records[0].config_id),
                      float(values.max()), float(values.mean()), float(values.var()))


def order_rows(rows):
    """Sort summary rows into the fixed 3p, 3p ent, ..., 9p ent order."""
    rank = {label: i for i, label in enumerate(MODEL_LABELS)}
    return sorted(rows, key=lambda r: rank.get(r.model, len(rank)))


def summary_table(records):
    """One SummaryRow per config found in ``records``, in model order."""
    groups = {}
    for r in records:
        groups.setdefault(r.config_id, []).append(r)
    rows = [summarize(sorted(g, key=lambda r: r.trial)) for g in groups.values()]
    models = [r.model for r in rows]
    if len(set(models)) != len(models):
        raise InputError("records hold more than one config per model; report them separately")
    return order_rows(rows)


def _fmt(x):
    return f"{x:.4f}"


def emit_report(rows, fmt="csv", path=None):
    """Write summary rows as CSV (4 decimals) or JSON; returns the text."""
    rows = list(rows)
    if not rows:
        raise InputError("refusing to write an empty report")
    kinds = {type(r) for r in rows}
    if len(kinds) > 1:
        raise InputError("cannot mix Max-Cut and RIM rows in one report")
    names = list(asdict(rows[0]))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            w.writerow([r.model] + [_fmt(getattr(r, k)) for k in names[1:]])
        text = buf.getvalue()
    elif fmt == "json":
        data = [{k: (v if k == "model" else round(v, 4)) for k, v in asdict(r).items()} for r in rows]
        text = json.dumps(data, indent=2) + "\n"
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"{path}: cannot write ({exc.strerror})") from None
    return text


def parse_report(text, fmt="csv"):
    """Inverse of :func:`emit_report`."""
    if fmt == "csv":
        data = list(csv.DictReader(io.StringIO(text)))
    elif fmt == "json":
        data = json.loads(text)
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    rows = []
    for d in data:
        if set(d) == {"model", "best", "mean", "var"}:
            rows.append(SummaryRow(d["model"], float(d["best"]), float(d["mean"]), float(d["var"])))
        elif set(d) == {"model", "mean_diff"}:
            rows.append(RimSummaryRow(d["model"], float(d["mean_diff"])))
        else:
            raise InputError(f"unrecognised report columns {sorted(d)}")
    return rows


# ------------------------------------------------------------ campaigns

def rim_instances(seed, count, n_min=5, n_max=15):
    """``count`` RIM instances with sizes drawn uniformly from [n_min, n_max].

    Instance ``i`` is ``gen_rim((seed, i), n_i)``.
    """
    sizes = np.random.default_rng(seed).integers(n_min, n_max + 1, size=count)
    return [gen_rim((seed, i), int(n)) for i, n in enumerate(sizes)]


def _rim_cell(job):
    i, problem, spec, optimizer, budget, seed, oracle = job
    cfg = ExperimentConfig(problem, spec, optimizer, budget, trials=1, seed=seed)
    rec, _ = run_trial(cfg, 0)
    return RimCell(i, spec.label, rec.best_eev, oracle.opt_value, eev_diff(rec.best_eev, oracle))


def rim_campaign_cells(instances, models=MODEL_LABELS, optimizer="shc_rr", budget=Budget(), seed=0, jobs=1):
    """One optimisation per (instance, model); each cell's EEV gap to the optimum."""
    instances = list(instances)
    if not instances:
        raise InputError("a campaign needs at least one instance")
    for p in instances:
        if p.kind != RIM:
            raise InputError(f"rim campaign got a {p.kind} instance")
    specs = [AnsatzSpec.from_label(m) for m in models]
    optima = [brute_force_optimum(p) for p in instances]
    jobs_list = [(i, p, s, optimizer, budget, seed, optima[i])
                 for i, p in enumerate(instances) for s in specs]
    if jobs <= 1:
        return [_rim_cell(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_rim_cell, jobs_list, chunksize=max(1, len(jobs_list) // (8 * jobs))))


def rim_diffs(cells):
    """model -> array of per-instance diffs (instance order)."""
    out = {}
    for c in sorted(cells, key=lambda c: c.instance):
        out.setdefault(c.model, []).append(c.diff)
    return {m: np.array(v) for m, v in out.items()}


def rim_rows(cells):
    return order_rows([RimSummaryRow(m, float(d.mean())) for m, d in rim_diffs(cells).items()])


def rim_campaign(instances, models=MODEL_LABELS, optimizer="shc_rr", budget=Budget(), seed=0, jobs=1):
    """Mean EEV difference to the brute-force optimum, one row per model."""
    return rim_rows(rim_campaign_cells(instances, models, optimizer, budget, seed, jobs))


RIM_CELL_FIELDS = ("instance", "model", "best_eev", "opt_value", "diff")


def write_rim_cells(cells, path):
    try:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RIM_CELL_FIELDS)
            for c in cells:
                w.writerow([c.instance, c.model, repr(c.best_eev), repr(c.opt_value), repr(c.diff)])
    except OSError as exc:
        raise OutputError(f"{path}: cannot write ({exc.strerror})") from None


def read_rim_cells(path):
    try:
        with Path(path).open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OutputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return [RimCell(int(r["instance"]), r["model"], float(r["best_eev"]),
                        float(r["opt_value"]), float(r["diff"])) for r in rows]
    except (KeyError, ValueError):
        raise InputError(f"{path}: not a RIM cell file") from None


def maxcut_campaign(problem, models=MODEL_LABELS, optimizers=OPTIMIZERS, budget=Budget(),
                    trials=100, seed=0, out_dir=None, jobs=1):
    """Every (model, optimizer) cell for one Max-Cut graph.

    Returns {optimizer: [SummaryRow, ...]}.  With ``out_dir`` each cell keeps
    its raw trial file ``<config_id>.csv`` there (and resumes from it).
    """
    if out_dir is not None:
        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"{out_dir}: cannot create ({exc.strerror})") from None
    tables = {}
    for opt in optimizers:
        rows = []
        for label in models:
            cfg = ExperimentConfig(problem, AnsatzSpec.from_label(label), opt, budget, trials, seed)
            if out_dir is not None:
                cfg = ExperimentConfig(problem, cfg.spec, opt, budget, trials, seed,
                                       out_dir / f"{cfg.config_id}.csv")
            rows.append(summarize(run_experiment(cfg, jobs)))
        tables[opt] = order_rows(rows)
    return tables


def default_jobs():
    return os.cpu_count() or 1
