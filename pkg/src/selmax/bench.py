"""Run records, the suite runner, and the evaluation metrics built on top of them."""

from __future__ import annotations

import concurrent.futures as cf
import itertools
import json
import math
import warnings
import zlib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import domains
from .heuristics import PatternTooLargeError
from .metering import CostModel, clock
from .search import Limits, Status, astar
from .selective import Combine, SelMaxConfig, make_evaluator
from .task import Task, parse_task

# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class RunConfig:
    combine: str = "selmax"
    ensemble: tuple[str, ...] = ("hmax", "lmcut")
    alpha: float = 1.0
    rho: float = 0.6
    N: int = 100
    sampling: str = "pdb"
    classifier: str = "nb"
    seed: int = 0  # extra seed component, e.g. to repeat a random combiner

    def __post_init__(self):
        Combine.parse(self.combine)
        if isinstance(self.ensemble, str):
            object.__setattr__(self, "ensemble", tuple(p.strip() for p in self.ensemble.split(",") if p.strip()))
        self.selmax  # validates the selective-max fields

    @property
    def selmax(self) -> SelMaxConfig:
        return SelMaxConfig(self.alpha, self.rho, self.N, self.sampling, self.classifier, self.ensemble)

    @property
    def id(self) -> str:
        ens = ",".join(self.ensemble)
        c = Combine.parse(self.combine)
        if c.kind == "single":
            return f"single[{self.ensemble[c.index]}]"
        if c.kind == "max":
            return f"max[{ens}]"
        if c.kind == "rand":
            return f"rand[{ens}]#{self.seed}"
        return (f"selmax[{ens}]a={self.alpha:g},r={self.rho:g},N={self.N},{self.sampling},"
                f"{self.classifier}" + (f"#{self.seed}" if self.seed else ""))

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class TaskSpec:
    """Either a generator call or a SAS-lite file."""

    domain: str
    size: int = 1
    seed: int = 0
    path: str | None = None

    @property
    def id(self) -> str:
        if self.path:
            return Path(self.path).stem
        return f"{self.domain}-{self.size}-s{self.seed}"

    def build(self) -> Task:
        if self.path:
            return parse_task(Path(self.path).read_text(), name=self.id)
        if self.domain == "deep":
            return domains.family_deep(self.size)
        if self.domain == "disjoint":
            return domains.family_disjoint(self.size)
        if self.domain == "chain-lock":
            return domains.chain_lock(self.size)
        return domains.gen_domain(self.domain, self.size, self.seed)

    @classmethod
    def from_dict(cls, d: Mapping) -> "TaskSpec":
        if "path" in d:
            return cls(d.get("domain", "file"), path=d["path"])
        return cls(d["domain"], int(d.get("size", 1)), int(d.get("seed", 0)))


def derive_seed(master: int, task_id: str, config_id: str) -> int:
    """Per-run seed that does not depend on execution order or worker count."""
    return zlib.crc32(f"{master}|{task_id}|{config_id}".encode())


# ---------------------------------------------------------------------- records


@dataclass
class RunRecord:
    task: str
    domain: str
    config: str
    status: str
    cost: float | None
    expanded: int
    generated: int
    evaluated: int
    time: float  # total solve time: seconds, or abstract units under a cost model
    heuristic_calls: dict[str, int] = field(default_factory=dict)
    heuristic_time: dict[str, float] = field(default_factory=dict)
    overhead: float = 0.0
    solve_time: float | None = None
    seed: int = 0
    abstract_time: bool = False
    plan_length: int | None = None
    plan: list[str] | None = None

    def __post_init__(self):
        if not 0.0 <= self.overhead <= 1.0:
            raise ValueError("overhead fraction must lie in [0, 1]")
        if self.status == Status.SOLVED.value and self.cost is None:
            raise ValueError("a solved record needs a cost")

    @property
    def solved(self) -> bool:
        return self.status == Status.SOLVED.value

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunRecord":
        return cls(**d)


def records_to_json(records: Sequence[RunRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=1, sort_keys=True)


def records_from_json(text: str) -> list[RunRecord]:
    return [RunRecord.from_dict(d) for d in json.loads(text)]


def run_config(task: Task, config: RunConfig, limits: Limits | None = None, seed: int = 0,
               cost_model: CostModel | None = None, domain: str = "", task_id: str | None = None) -> RunRecord:
    """Build the evaluator, search, and summarise; limits become TIMEOUT/MEMOUT records."""
    limits = limits or Limits()
    t0 = clock()
    try:
        ev = make_evaluator(task, config.combine, config.selmax, seed=seed, cost_model=cost_model)
    except (PatternTooLargeError, MemoryError):
        return RunRecord(task_id or task.name, domain, config.id, Status.MEMOUT.value, None, 0, 0, 0,
                         clock() - t0 if cost_model is None else 0.0, seed=seed,
                         abstract_time=cost_model is not None)
    if limits.time is not None:
        limits = replace(limits, time=max(0.0, limits.time - ev.setup_time))
    try:
        res = astar(task, ev, limits)
    except MemoryError:
        return RunRecord(task_id or task.name, domain, config.id, Status.MEMOUT.value, None, 0, 0, 0,
                         clock() - t0 if cost_model is None else 0.0, seed=seed,
                         abstract_time=cost_model is not None)
    st = res.stats
    st.absorb(ev.meter, ev.setup_time)
    return RunRecord(
        task=task_id or task.name,
        domain=domain,
        config=config.id,
        status=res.status.value,
        cost=res.cost,
        expanded=st.expanded,
        generated=st.generated,
        evaluated=st.evaluated,
        time=st.total_time,
        heuristic_calls=st.heuristic_calls,
        heuristic_time=st.heuristic_time,
        overhead=st.overhead_fraction,
        solve_time=st.total_time if res.solved else None,
        seed=seed,
        abstract_time=st.abstract_time,
        plan_length=len(res.plan) if res.plan is not None else None,
        plan=[task.actions[i].name for i in res.plan] if res.plan is not None else None,
    )


# ------------------------------------------------------------------------ suites


@dataclass
class Suite:
    tasks: list[TaskSpec]
    configs: list[RunConfig]
    seed: int = 0
    limits: Limits = field(default_factory=Limits)
    workers: int = 1
    cost_model: CostModel | None = None

    @classmethod
    def from_manifest(cls, data: Mapping, base: Path | None = None) -> "Suite":
        tasks = []
        for t in data["tasks"]:
            spec = TaskSpec.from_dict(t)
            if spec.path and base is not None and not Path(spec.path).is_absolute():
                spec = replace(spec, path=str(base / spec.path))
            tasks.append(spec)
        configs = [RunConfig.from_dict(c) for c in data["configs"]]
        lim = data.get("limits", {})
        cm = data.get("cost_model")
        if isinstance(cm, str):
            cm = CostModel.load(base / cm if base is not None else cm)
        elif isinstance(cm, dict):
            cm = dict(cm)
            default = float(cm.pop("default", 1.0))
            cm = CostModel({k: float(v) for k, v in cm.items()}, default)
        else:
            cm = CostModel.from_env()
        return cls(tasks, configs, int(data.get("seed", 0)),
                   Limits(lim.get("time"), lim.get("expansions"), lim.get("nodes")),
                   int(data.get("workers", 1)), cm)


def _run_job(job) -> RunRecord:
    spec, config, master, limits, cost_model = job
    task = spec.build()
    seed = derive_seed(master, spec.id, config.id)
    return run_config(task, config, limits, seed, cost_model, domain=spec.domain, task_id=spec.id)


def run_suite(suite: Suite, workers: int | None = None) -> list[RunRecord]:
    """All (task, config) runs; output order is task-major regardless of ``workers``."""
    workers = suite.workers if workers is None else workers
    jobs = [(spec, cfg, suite.seed, suite.limits, suite.cost_model)
            for spec in suite.tasks for cfg in suite.configs]
    if workers <= 1:
        return [_run_job(j) for j in jobs]
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs, chunksize=1))


def generated_suite(per_domain: int = 50, seed: int = 0) -> list[TaskSpec]:
    """Gripper 1-4 plus seeded chain-branch and transport-lite instances."""
    specs = [TaskSpec("gripper", n) for n in range(1, 5)]
    for i in range(per_domain):
        specs.append(TaskSpec("chain-branch", 1 + i % 9, seed + i))
    for i in range(per_domain):
        specs.append(TaskSpec("transport-lite", 1 + i % 12, seed + i))
    return specs


def two_family_suite(n: int = 4) -> list[TaskSpec]:
    return [TaskSpec("deep", i) for i in range(n)] + [TaskSpec("disjoint", i) for i in range(n)]


# ----------------------------------------------------------------------- metrics


def _group(records: Iterable[RunRecord], key) -> dict:
    out: dict = {}
    for r in records:
        out.setdefault(key(r), []).append(r)
    return out


def normalized_coverage(records: Sequence[RunRecord]) -> dict[str, dict[str, tuple[float, int]]]:
    """Per domain and config: (solved / tasks solved by any config, solved count)."""
    configs = sorted({r.config for r in records})
    out = {}
    for dom, recs in sorted(_group(records, lambda r: r.domain).items()):
        union = {r.task for r in recs if r.solved}
        if not union:
            continue
        row = {}
        for c in configs:
            n = len({r.task for r in recs if r.config == c and r.solved})
            row[c] = (n / len(union), n)
        out[dom] = row
    return out


def geomean(xs: Sequence[float]) -> float:
    if not xs:
        raise ValueError("geometric mean of nothing")
    return math.exp(sum(math.log(x) for x in xs) / len(xs))


def expansion_ratio_geomean(records: Sequence[RunRecord], baseline: str) -> dict:
    """Per-domain geometric mean of expansions(config)/expansions(baseline) over
    tasks every config solved; overall is the geometric mean of the domain means."""
    configs = sorted({r.config for r in records})
    if baseline not in configs:
        raise ValueError(f"baseline {baseline!r} has no records")
    per_domain: dict[str, dict[str, float]] = {}
    for dom, recs in sorted(_group(records, lambda r: r.domain).items()):
        by_task = _group(recs, lambda r: r.task)
        common = sorted(t for t, rs in by_task.items()
                        if {r.config for r in rs if r.solved} >= set(configs))
        if not common:
            warnings.warn(f"domain {dom!r}: no task solved by every config; omitted")
            continue
        row = {}
        for c in configs:
            ratios = []
            for t in common:
                exp = {r.config: r.expanded for r in by_task[t]}
                # expansions of 0 (goal at the root) count as 1 to keep ratios finite
                ratios.append(max(exp[c], 1) / max(exp[baseline], 1))
            row[c] = geomean(ratios)
        per_domain[dom] = row
    overall = {c: geomean([row[c] for row in per_domain.values()]) for c in configs} if per_domain else {}
    return {"domains": per_domain, "overall": overall}


def anytime_profile(records: Sequence[RunRecord], grid: Sequence[float]) -> dict[str, list[int]]:
    out = {}
    for c, recs in sorted(_group(records, lambda r: r.config).items()):
        times = sorted(r.solve_time for r in recs if r.solved and r.solve_time is not None)
        out[c] = [sum(1 for t in times if t <= g) for g in grid]
    return out


def overhead_report(records: Sequence[RunRecord]) -> dict[str, float]:
    """Mean overhead fraction per domain over selective-max runs."""
    sel = [r for r in records if r.config.startswith("selmax")]
    return {d: sum(r.overhead for r in rs) / len(rs)
            for d, rs in sorted(_group(sel, lambda r: r.domain).items())}


# --------------------------------------------------------------------- portfolio


def _interruptible_time(times: Sequence[float], limit: float) -> float:
    """Solve time of one ordering under doubling slots, or inf."""
    used = 0.0
    slot = 1.0
    if not any(t < math.inf for t in times):
        return math.inf
    while used < limit:
        for t in times:
            if t <= slot:
                done = used + t
                return done if done <= limit else math.inf
            used += slot
            if used >= limit:
                return math.inf
        slot *= 2
    return math.inf


def portfolio_simulate(solo: Mapping[str, Sequence[float]], mode: str, limit: float) -> dict[str, float]:
    """Tasks a sequential portfolio solves, mapped to the time it solves them.

    ``solo[task][i]`` is heuristic i's stand-alone solve time (inf when unsolved).
    ``contract`` splits ``limit`` evenly and runs the slots in the given order;
    ``interruptible`` restarts every heuristic with slots 1, 2, 4, ... seconds,
    using the ordering that solves the task soonest.
    """
    out = {}
    for task, times in sorted(solo.items()):
        times = [math.inf if t is None else float(t) for t in times]
        n = len(times)
        if n == 0:
            continue
        if mode == "contract":
            share = limit / n
            for i, t in enumerate(times):
                if t <= share:
                    out[task] = i * share + t
                    break
        elif mode == "interruptible":
            best = min(_interruptible_time([times[i] for i in order], limit)
                       for order in itertools.permutations(range(n)))
            if best < math.inf:
                out[task] = best
        else:
            raise ValueError("mode must be 'contract' or 'interruptible'")
    return out


def portfolio_anytime(solved: Mapping[str, float], grid: Sequence[float]) -> list[int]:
    return [sum(1 for t in solved.values() if t <= g) for g in grid]


def solo_times(records: Sequence[RunRecord], configs: Sequence[str] | None = None) -> dict[str, list[float]]:
    """Per-task solve times of the given (default: all single-heuristic) configs."""
    if configs is None:
        configs = sorted({r.config for r in records if r.config.startswith("single")})
    by_task = _group(records, lambda r: r.task)
    out = {}
    for task, recs in by_task.items():
        t = {r.config: r.solve_time for r in recs if r.solved}
        out[task] = [t.get(c, math.inf) for c in configs]
    return out


# ----------------------------------------------------------------------- tables


def format_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def coverage_cell(score: float, solved: int) -> str:
    return f"{score:.2f} ({solved})"


def coverage_table(cov: Mapping[str, Mapping[str, tuple[float, int]]]) -> str:
    configs = sorted({c for row in cov.values() for c in row})
    rows = [[dom] + [coverage_cell(*row[c]) for c in configs] for dom, row in cov.items()]
    totals = ["total"] + [f"{sum(row[c][0] for row in cov.values()):.2f}" for c in configs]
    return format_table(["domain"] + configs, rows + [totals])


def report(records: Sequence[RunRecord], baseline: str | None = None,
           grid: Sequence[float] | None = None) -> dict:
    """Everything the text report shows, as plain data."""
    configs = sorted({r.config for r in records})
    if baseline is None:
        baseline = next((c for c in configs if c.startswith("max")), configs[0] if configs else None)
    if grid is None:
        top = max((r.solve_time for r in records if r.solve_time is not None), default=1.0)
        grid = [top * i / 10 for i in range(1, 11)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ratios = expansion_ratio_geomean(records, baseline) if baseline else {"domains": {}, "overall": {}}
    return {
        "coverage": normalized_coverage(records),
        "baseline": baseline,
        "expansion_ratios": ratios,
        "overhead": overhead_report(records),
        "anytime_grid": list(grid),
        "anytime": anytime_profile(records, grid),
    }


def render_report(rep: Mapping) -> str:
    parts = ["Normalized coverage", coverage_table(rep["coverage"]), ""]
    ratios = rep["expansion_ratios"]
    if ratios["domains"]:
        configs = sorted(ratios["overall"])
        rows = [[d] + [f"{row[c]:.2f}" for c in configs] for d, row in ratios["domains"].items()]
        rows.append(["overall"] + [f"{ratios['overall'][c]:.2f}" for c in configs])
        parts += [f"Expansions relative to {rep['baseline']} (geometric mean)",
                  format_table(["domain"] + configs, rows), ""]
    if rep["overhead"]:
        rows = [[d, f"{100 * v:.1f}%"] for d, v in rep["overhead"].items()]
        parts += ["Selective max overhead", format_table(["domain", "overhead"], rows), ""]
    grid = rep["anytime_grid"]
    rows = [[c] + [str(n) for n in counts] for c, counts in rep["anytime"].items()]
    parts += ["Solved within time", format_table(["config"] + [f"{g:.3g}" for g in grid], rows)]
    return "\n".join(parts)


def medium_suite(seed: int = 0) -> list[TaskSpec]:
    """Larger instances whose searches run long enough for per-search overhead to amortise."""
    specs = [TaskSpec("gripper", n) for n in (5, 6, 7)]
    specs += [TaskSpec("chain-lock", size) for size in range(6)]
    specs += [TaskSpec("transport-lite", size, seed + i) for i, size in enumerate(range(28, 34))]
    return specs
