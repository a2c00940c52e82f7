"""Command line: qaoa-bench {gen-rim, oracle, run, campaign, report}.

Exit status is 0 on success, 1 for a bad configuration or input file, and
2 when a file cannot be read or written.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

from . import harness
from .ansatz import MODEL_LABELS, AnsatzSpec
from .errors import BenchError, InputError, OutputError
from .optimizers import Budget
from .problems import (RIM, RIM_MAX_NODES, RIM_MIN_NODES, brute_force_optimum, gen_rim, load_instance,
                       make_problem, save_instance)

OPTIMIZER_NAMES = {"shc-rr": "shc_rr", "ls": "ls_mult", "ls-sum": "ls_sum"}
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _problem_args(p, rim_file=True):
    p.add_argument("--problem", choices=("cyclic", "complete", "rim"), default="cyclic")
    p.add_argument("--nodes", type=int, default=4)
    if rim_file:
        p.add_argument("--instance", help="instance JSON file (overrides --problem/--nodes)")
    p.add_argument("--rim-seed", type=int, help="seed for a generated RIM instance (default: --seed)")


def _budget_args(p):
    p.add_argument("--outer", type=int, default=100)
    p.add_argument("--inner", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=harness.default_jobs(), help="worker processes")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = _Parser(prog="qaoa-bench", description="Exact-statevector QAOA optimiser benchmark.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-rim", help="write random-field Ising instance files")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=5, help="size of a single instance")
    p.add_argument("--count", type=int, help="write this many instances into the --out directory")
    p.add_argument("--min-nodes", type=int, default=RIM_MIN_NODES)
    p.add_argument("--max-nodes", type=int, default=RIM_MAX_NODES)
    p.add_argument("--out", help="file (single instance) or directory (--count); default stdout")

    p = sub.add_parser("oracle", help="brute-force optimum of an instance")
    p.add_argument("instance", nargs="?", help="instance JSON file")
    _problem_args(p, rim_file=False)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run", help="run the trials of one configuration")
    _problem_args(p)
    p.add_argument("--layers", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--entangled", action="store_true")
    p.add_argument("--optimizer", choices=tuple(OPTIMIZER_NAMES), default="shc-rr")
    p.add_argument("--trials", type=int, default=100)
    _budget_args(p)
    p.add_argument("--out", help="raw trial CSV (resumed if it exists)")
    p.add_argument("--summary", help="summary table path (default stdout)")
    p.add_argument("--dump-traces", help="append per-outer-iteration best-so-far traces here")

    p = sub.add_parser("campaign", help="all models x optimizers for one problem")
    _problem_args(p)
    p.add_argument("--optimizer", choices=tuple(OPTIMIZER_NAMES), action="append",
                   help="repeatable; default all three")
    p.add_argument("--models", default=",".join(m.replace(" ", "-") for m in MODEL_LABELS),
                   help="comma-separated, e.g. 3p,3p-ent,9p")
    p.add_argument("--trials", type=int, default=100, help="trials per Max-Cut cell")
    p.add_argument("--instances", nargs="+", help="RIM instance files")
    p.add_argument("--count", type=int, default=100, help="generated RIM instances when --instances is absent")
    p.add_argument("--min-nodes", type=int, default=RIM_MIN_NODES)
    p.add_argument("--max-nodes", type=int, default=RIM_MAX_NODES)
    _budget_args(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("report", help="summarise raw trial files or RIM cell files")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="default stdout")
    return parser


def _problem(args):
    if getattr(args, "instance", None):
        return load_instance(args.instance)
    seed = args.rim_seed if args.rim_seed is not None else args.seed
    return make_problem(args.problem, args.nodes, seed)


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"{path}: cannot write ({exc.strerror})") from None


def cmd_gen_rim(args):
    if args.count is None:
        p = gen_rim(args.seed, args.nodes)
        _write(json.dumps(p.to_dict()) + "\n", args.out)
        return
    if args.out is None:
        raise OutputError("--count needs an --out directory")
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for i, p in enumerate(harness.rim_instances(args.seed, args.count, args.min_nodes, args.max_nodes)):
            save_instance(p, out / f"rim-{i:03d}.json")
    except OSError as exc:
        raise OutputError(f"{out}: cannot write ({exc.strerror})") from None


def cmd_oracle(args):
    res = brute_force_optimum(_problem(args))
    print(json.dumps({"opt_value": res.opt_value, "n_optima": len(res.argmax), "argmax": res.argmax}))


def cmd_run(args):
    spec = AnsatzSpec(args.layers, args.entangled)
    cfg = harness.ExperimentConfig(_problem(args), spec, OPTIMIZER_NAMES[args.optimizer],
                                   Budget(args.outer, args.inner), args.trials, args.seed, args.out)
    records = harness.run_experiment(cfg, args.jobs, args.dump_traces)
    text = harness.emit_report([harness.summarize(records)], args.format)
    _write(text, args.summary)


def cmd_campaign(args):
    models = [AnsatzSpec.from_label(m).label for m in args.models.split(",") if m.strip()]
    optimizers = [OPTIMIZER_NAMES[o] for o in (args.optimizer or OPTIMIZER_NAMES)]
    budget = Budget(args.outer, args.inner)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"{out}: cannot create ({exc.strerror})") from None
    ext = args.format
    if args.problem == RIM or args.instances:
        if args.instances:
            instances = [load_instance(f) for f in args.instances]
        else:
            instances = harness.rim_instances(args.seed, args.count, args.min_nodes, args.max_nodes)
        for opt in optimizers:
            cells = harness.rim_campaign_cells(instances, models, opt, budget, args.seed, args.jobs)
            harness.write_rim_cells(cells, out / f"cells-{opt}.csv")
            harness.emit_report(harness.rim_rows(cells), ext, out / f"summary-{opt}.{ext}")
    else:
        tables = harness.maxcut_campaign(_problem(args), models, optimizers, budget,
                                         args.trials, args.seed, out / "raw", args.jobs)
        for opt, rows in tables.items():
            harness.emit_report(rows, ext, out / f"summary-{opt}.{ext}")


def _is_rim_cell_file(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            header = next(csv.reader(fh), [])
    except OSError as exc:
        raise OutputError(f"{path}: cannot read ({exc.strerror})") from None
    return tuple(header) == harness.RIM_CELL_FIELDS


def cmd_report(args):
    rim = [f for f in args.files if _is_rim_cell_file(f)]
    raw = [f for f in args.files if f not in rim]
    if rim and raw:
        raise InputError("cannot report RIM cell files and raw trial files together")
    if rim:
        cells = [c for f in rim for c in harness.read_rim_cells(f)]
        rows = harness.rim_rows(cells)
    else:
        rows = harness.summary_table([r for f in raw for r in harness.read_trials(f)])
    text = harness.emit_report(rows, args.format)
    _write(text, args.out)


COMMANDS = {
    "gen-rim": cmd_gen_rim,
    "oracle": cmd_oracle,
    "run": cmd_run,
    "campaign": cmd_campaign,
    "report": cmd_report,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (OutputError, OSError) as exc:
        print(f"qaoa-bench: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (BenchError, ValueError) as exc:
        print(f"qaoa-bench: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
