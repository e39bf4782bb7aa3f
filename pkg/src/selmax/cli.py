"""Command-line entry point: ``selmax {plan,suite,report,portfolio,gen,modelsim}``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bench, modelsim
from .domains import DOMAINS
from .metering import CostModel
from .search import Limits
from .task import parse_task, render_task

DEFAULT_ENSEMBLE = "hmax,lmcut"


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble", default=DEFAULT_ENSEMBLE,
                   help="comma list of blind, hmax, lmcut, pdb:<v1+v2...> (default: %(default)s)")
    p.add_argument("--combine", default="selmax", help="single:<i> | max | rand | selmax (default: %(default)s)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.6)
    p.add_argument("--sampling", choices=("biased", "unbiased", "pdb"), default="pdb")
    p.add_argument("--sample-size", type=int, default=100, dest="sample_size")
    p.add_argument("--classifier", default="nb", help="nb | knn:<k> (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ipc", action="store_true", help="competition preset: N=1000, biased probes")
    p.add_argument("--time-limit", type=float, default=None, dest="time_limit")
    p.add_argument("--max-expansions", type=int, default=None, dest="max_expansions")


def _config(args) -> bench.RunConfig:
    n, sampling = args.sample_size, args.sampling
    if args.ipc:
        n, sampling = 1000, "biased"
    return bench.RunConfig(args.combine, args.ensemble, args.alpha, args.rho, n, sampling, args.classifier)


def cmd_plan(args) -> int:
    path = Path(args.task)
    task = parse_task(path.read_text(), name=path.stem)
    cfg = _config(args)
    rec = bench.run_config(task, cfg, Limits(args.time_limit, args.max_expansions), args.seed,
                           CostModel.from_env(), domain="file", task_id=path.stem)
    if args.json:
        print(json.dumps(rec.to_dict(), indent=1, sort_keys=True))
        return 0 if rec.solved else 1
    print(f"status: {rec.status}")
    if rec.solved:
        print(f"cost: {rec.cost:g}")
        print(f"plan length: {rec.plan_length}")
    print(f"expanded: {rec.expanded}  generated: {rec.generated}  evaluated: {rec.evaluated}")
    unit = "units" if rec.abstract_time else "s"
    print(f"time: {rec.time:.6g} {unit}  overhead: {100 * rec.overhead:.1f}%")
    for name, calls in rec.heuristic_calls.items():
        print(f"  {name}: {calls} calls, {rec.heuristic_time[name]:.6g} {unit}")
    if args.print_plan and rec.solved:
        for name in rec.plan:
            print(name)
    return 0 if rec.solved else 1


def cmd_suite(args) -> int:
    path = Path(args.manifest)
    suite = bench.Suite.from_manifest(json.loads(path.read_text()), base=path.parent)
    records = bench.run_suite(suite, workers=args.workers)
    text = bench.records_to_json(records)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


def _load_records(path: str) -> list[bench.RunRecord]:
    return bench.records_from_json(Path(path).read_text())


def cmd_report(args) -> int:
    rep = bench.report(_load_records(args.records), baseline=args.baseline)
    if args.json:
        print(json.dumps(rep, indent=1, sort_keys=True))
    else:
        print(bench.render_report(rep))
    return 0


def cmd_portfolio(args) -> int:
    records = _load_records(args.records)
    configs = args.configs.split(";") if args.configs else None
    solo = bench.solo_times(records, configs)
    solved = bench.portfolio_simulate(solo, args.mode, args.limit)
    if args.json:
        print(json.dumps({"mode": args.mode, "limit": args.limit, "solved": solved}, indent=1, sort_keys=True))
    else:
        print(f"{args.mode} portfolio, limit {args.limit:g}: solved {len(solved)} of {len(solo)}")
        for task, t in solved.items():
            print(f"  {task}: {t:.6g}")
    return 0


def cmd_gen(args) -> int:
    task = bench.TaskSpec(args.domain, args.size, args.seed).build()
    text = render_task(task)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_modelsim(args) -> int:
    if args.b is not None:
        if args.c_star is None:
            raise SystemExit("--b needs --c-star")
        insts = [modelsim.gen_model_tree(args.b, args.c_star, args.profile, args.seed,
                                         t1=1, t2=Fraction(args.ratio).limit_denominator(1000))]
    else:
        insts = list(modelsim.random_instances(args.instances, args.seed))
    text = modelsim.to_csv(modelsim.model_rows(insts, args.charge))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selmax", description="Selective-max A* planning toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="solve one SAS-lite task")
    sp.add_argument("task")
    _add_config_flags(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--print-plan", action="store_true", dest="print_plan")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("suite", help="run every (task, config) pair of a JSON manifest")
    sp.add_argument("manifest")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("report", help="coverage, expansion ratios, overhead and anytime tables")
    sp.add_argument("records")
    sp.add_argument("--baseline")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("portfolio", help="simulate a sequential portfolio of single-heuristic runs")
    sp.add_argument("records")
    sp.add_argument("--mode", choices=("contract", "interruptible"), required=True)
    sp.add_argument("--limit", type=float, required=True, help="total time limit (record time units)")
    sp.add_argument("--configs", help="';'-separated config ids (default: every single-heuristic config)")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_portfolio)

    sp = sub.add_parser("gen", help="write a generated task in SAS-lite form")
    sp.add_argument("domain", choices=DOMAINS + ("chain-lock", "deep", "disjoint"))
    sp.add_argument("size", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("modelsim", help="idealized-model strategy comparison as CSV")
    sp.add_argument("--instances", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--charge", choices=modelsim.CHARGES, default="contour")
    sp.add_argument("--b", type=int)
    sp.add_argument("--c-star", type=int, dest="c_star")
    sp.add_argument("--profile", choices=[p.value for p in modelsim.Profile], default="CONSTANT_H1")
    sp.add_argument("--ratio", type=float, default=4.5, help="t2/t1 for a single instance")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_modelsim)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"selmax: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
