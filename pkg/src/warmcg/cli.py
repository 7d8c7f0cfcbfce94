"""Command-line entry point: ``warmcg <subcommand> ...``.

Exit codes: 0 success, 1 domain error (infeasible, mismatch, bad data),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import (METHODS, ObjectiveMismatchError, prepare, run_pipeline, write_metrics,
                    write_summary, read_metrics)
from .congen import UnboundedProblemError, identify_invariant_set
from .formats import FORMAT_VERSION, read_any, read_dataset, read_sets, write_dataset
from .instances import (GenerationError, SyntheticFamilyConfig, UcFamilyConfig, gen_synthetic,
                        gen_toy, gen_uc)
from .learner import LabelMatrix, fit
from .milp import NodeLimitError, solve_milp

log = logging.getLogger("warmcg")

DOMAIN_ERRORS = (ValueError, KeyError, ObjectiveMismatchError, GenerationError,
                 UnboundedProblemError, NodeLimitError, OSError)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="warmcg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"warmcg {__version__} (format {FORMAT_VERSION})")
    p.add_argument("--config", help="JSON file with default flag values (flags win)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-toy", help="toy family: b in {1, 1.25, 1.5} plus test b=1.3")
    s.add_argument("--out", required=True)

    for name, cfg in (("gen-synthetic", SyntheticFamilyConfig), ("gen-uc", UcFamilyConfig)):
        d = cfg()
        s = sub.add_parser(name)
        s.add_argument("--n", type=int, default=d.n)
        s.add_argument("--m", type=int, default=d.m)
        s.add_argument("--T", type=int, default=d.T)
        s.add_argument("--seed", type=int, default=d.seed)
        s.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve one instance over all its constraints")
    s.add_argument("--dataset", required=True)
    s.add_argument("--name", required=True)

    s = sub.add_parser("identify", help="binding and invariant sets for every instance")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("predict", help="knn warm-start set for one query instance")
    s.add_argument("--sets", required=True)
    s.add_argument("--dataset", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--source", choices=("binding", "invariant"), default="invariant")
    s.add_argument("--query", required=True)

    s = sub.add_parser("benchmark", help="leave-one-out benchmark, metrics CSV")
    s.add_argument("--dataset", required=True)
    s.add_argument("--method", default="s-learner",
                   help=f"comma-separated subset of {','.join(METHODS)}")
    s.add_argument("--k", type=_int_list, default=[1])
    s.add_argument("--seed", type=int, default=0,
                   help="recorded for reproducibility; the pipeline itself draws no randomness")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--sets", help="precomputed sets from `identify` (skips offline identification)")
    s.add_argument("--out", required=True)
    s.add_argument("--summary", help="also write the aggregate JSON here")

    s = sub.add_parser("report", help="aggregate a metrics CSV into summary JSON")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    return p


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _find(dataset, name):
    for inst in dataset:
        if inst.name == name:
            return inst
    raise ValueError(f"no instance named {name!r}")


def cmd_gen(args) -> int:
    if args.command == "gen-toy":
        train, test = gen_toy()
        data = train + [test]
    elif args.command == "gen-synthetic":
        data = gen_synthetic(SyntheticFamilyConfig(args.n, args.m, args.T, args.seed))
    else:
        data = gen_uc(UcFamilyConfig(args.n, args.m, args.T, args.seed))
    write_dataset(args.out, data)
    log.info("wrote %d instances to %s", len(data), args.out)
    return 0


def cmd_solve(args) -> int:
    inst = _find(read_any(args.dataset), args.name)
    out = solve_milp(inst)
    rec = {"name": inst.name, "status": out.status.value}
    if out.optimal:
        rec.update(objective=out.objective, solution=[float(v) for v in out.solution])
    _emit(rec)
    return 0 if out.optimal else 1


def cmd_identify(args) -> int:
    with open(args.out, "w") as fh:
        for inst in read_dataset(args.input):
            ident = identify_invariant_set(inst)
            fh.write(json.dumps({"name": inst.name, "B": sorted(ident.binding.ids),
                                 "S": sorted(ident.invariant.ids),
                                 "objective": ident.full.objective}) + "\n")
    return 0


def cmd_predict(args) -> int:
    dataset = read_dataset(args.dataset)
    sets = read_sets(args.sets)
    query = _find(dataset, args.query)
    key = "B" if args.source == "binding" else "S"
    train = [inst for inst in dataset if inst.name != query.name and inst.name in sets]
    labels = LabelMatrix.from_sets(train, [inst.make_set(sets[inst.name][key]) for inst in train],
                                   args.source)
    pred = fit(labels, args.k).predict_set(query.theta, query)
    _emit({"name": query.name, "predicted": list(pred.ids)})
    return 0


def cmd_benchmark(args) -> int:
    dataset = read_dataset(args.dataset)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ValueError(f"unknown method(s) {bad}")
    sets = read_sets(args.sets) if args.sets else None
    if sets is not None:
        missing = [i.name for i in dataset if i.name not in sets]
        if missing:
            raise ValueError(f"sets file lacks {len(missing)} instance(s), e.g. {missing[0]}")
    learners = any(m.endswith("learner") for m in methods)
    offline = prepare(dataset, with_sets=learners, sets=sets)
    all_runs = []
    for method in methods:
        for k in (args.k if method.endswith("learner") else [None]):
            runs, agg = run_pipeline(dataset, method, k, offline=offline, jobs=args.jobs)
            all_runs += runs
            _emit({key: agg[key] for key in ("method", "k", "C_min", "C_max", "I_min", "I_max",
                                            "P1", "Delta")})
    write_metrics(args.out, all_runs)
    if args.summary:
        write_summary(args.summary, all_runs)
    return 0


def cmd_report(args) -> int:
    rows = write_summary(args.out, read_metrics(args.input))
    for r in rows:
        _emit({key: r[key] for key in ("method", "k", "C_min", "C_max", "I_min", "I_max", "P1",
                                      "Delta")})
    return 0


COMMANDS = {
    "gen-toy": cmd_gen, "gen-synthetic": cmd_gen, "gen-uc": cmd_gen, "solve": cmd_solve,
    "identify": cmd_identify, "predict": cmd_predict, "benchmark": cmd_benchmark,
    "report": cmd_report,
}


def _config_defaults(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    cfg = json.loads(Path(known.config).read_text())
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        defaults = _config_defaults(argv)
    except (OSError, json.JSONDecodeError) as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"warmcg: error: cannot read config: {e}\n")
        return 2
    if defaults:
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                known = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
                for a in sp._actions:
                    if a.dest in defaults:
                        a.required = False
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if isinstance(getattr(args, "k", None), str):
        args.k = _int_list(args.k)
    elif isinstance(getattr(args, "k", None), int) and args.command == "benchmark":
        args.k = [args.k]
    try:
        return COMMANDS[args.command](args)
    except DOMAIN_ERRORS as e:
        sys.stderr.write(f"warmcg: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
