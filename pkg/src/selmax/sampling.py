"""Random-walk state-space samples and the search-space estimates drawn from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .heuristics import DEAD_END, Heuristic, relaxed_plan_length
from .metering import Meter
from .task import State, Task

METHODS = ("biased", "unbiased", "pdb")
MIN_BRANCHING = 1.0001
MIN_TIME = 1e-12


class EstimationError(ValueError):
    pass


@dataclass
class Sample:
    states: list[State] = field(default_factory=list)
    values: list[tuple[float, ...]] = field(default_factory=list)
    branching: list[int] = field(default_factory=list)
    applied_costs: list[float] = field(default_factory=list)
    timings: dict[str, list[float]] = field(default_factory=dict)
    provenance: str = ""
    seed: int = 0
    d_hat: int = 0
    fallback_cost: float = 1.0
    probes: int = 0

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Estimates:
    b: float
    t: tuple[float, ...]
    c_hat: float
    d_hat: int


def goal_depth_estimate(task: Task, max_h: Callable[[State], float]) -> tuple[int, bool]:
    """Return (depth estimate, unsolvable-at-init flag).

    Unit-cost tasks use twice the initial heuristic value; otherwise the number
    of actions in a relaxed plan from the initial state.
    """
    h0 = max_h(task.init)
    if h0 == DEAD_END:
        return 0, True
    if task.unit_cost:
        return int(math.floor(2 * h0 + 0.5)), False
    n = relaxed_plan_length(task, task.init)
    if n == DEAD_END:
        return 0, True
    return int(n), False


class _Prober:
    """Shared machinery: memoised, metered ensemble evaluation and sample filling."""

    def __init__(self, task: Task, ensemble: Sequence[Heuristic], n: int, d_hat: int, seed: int,
                 method: str, meter: Meter | None):
        if n < 1:
            raise ValueError("sample size must be >= 1")
        self.task = task
        self.ensemble = list(ensemble)
        self.n = n
        self.rng = np.random.default_rng(seed)
        self.meter = meter or Meter()
        self.cache: dict[State, tuple[float, ...]] = {}
        costs = [a.cost for a in task.actions]
        self.sample = Sample(provenance=method, seed=seed, d_hat=d_hat,
                             fallback_cost=float(np.mean(costs)) if costs else 1.0,
                             timings={h.name: [] for h in self.ensemble})

    def values(self, s: State) -> tuple[float, ...]:
        v = self.cache.get(s)
        if v is None:
            out = []
            for h in self.ensemble:
                val, dt = self.meter.timed_call(h, s, sampling=True)
                self.sample.timings[h.name].append(dt)
                out.append(val)
            v = self.cache[s] = tuple(out)
        return v

    def add(self, s: State, v: tuple[float, ...]) -> bool:
        """Append to the sample; True once the sample is full."""
        smp = self.sample
        if len(smp.states) < self.n:
            smp.states.append(s)
            smp.values.append(v)
            smp.branching.append(len(self.task.applicable_actions(s)))
        return len(smp.states) >= self.n

    @property
    def full(self) -> bool:
        return len(self.sample.states) >= self.n


def _walk_probes(task: Task, ensemble, n: int, d_hat: int, seed: int, biased: bool,
                 meter: Meter | None) -> Sample:
    p = _Prober(task, ensemble, n, d_hat, seed, "biased" if biased else "unbiased", meter)
    s0 = task.init
    if p.add(s0, p.values(s0)):
        return p.sample
    actions = task.actions
    while not p.full and p.sample.probes < 10 * n:
        p.sample.probes += 1
        s = s0
        for _ in range(d_hat):
            if task.is_goal(s):
                break
            succ = task.successor_ids(s)
            if not succ:
                break
            cand, weights = [], []
            for ai, t in succ:
                v = p.values(t)
                if p.add(t, v):
                    return p.sample
                m = max(v)
                if m != DEAD_END:
                    cand.append((ai, t))
                    weights.append(1.0 / (m + 1.0) if biased else 1.0)
            if not cand:
                break
            w = np.asarray(weights)
            k = int(p.rng.choice(len(cand), p=w / w.sum()))
            ai, s = cand[k]
            p.sample.applied_costs.append(actions[ai].cost)
    return p.sample


def sample_biased_probes(task: Task, ensemble, n: int, d_hat: int, seed: int,
                         meter: Meter | None = None) -> Sample:
    """Walks preferring successors with low max-heuristic (weight 1/(h+1)); keeps siblings too."""
    return _walk_probes(task, ensemble, n, d_hat, seed, True, meter)


def sample_unbiased_probes(task: Task, ensemble, n: int, d_hat: int, seed: int,
                           meter: Meter | None = None) -> Sample:
    return _walk_probes(task, ensemble, n, d_hat, seed, False, meter)


def sample_pdb_walk(task: Task, ensemble, n: int, d_hat: int, seed: int,
                    meter: Meter | None = None) -> Sample:
    """``n`` uniform walks of Binomial(2*d_hat, 1/2) length; only each walk's last state is kept."""
    p = _Prober(task, ensemble, n, d_hat, seed, "pdb", meter)
    actions = task.actions
    while not p.full:
        p.sample.probes += 1
        depth = int(p.rng.binomial(2 * d_hat, 0.5)) if d_hat > 0 else 0
        s = task.init
        for _ in range(depth):
            if task.is_goal(s):
                break
            ids = task.applicable_actions(s)
            if not ids:
                break
            ai = ids[int(p.rng.integers(len(ids)))]
            p.sample.applied_costs.append(actions[ai].cost)
            s = _step(s, actions[ai])
        p.add(s, p.values(s))
    return p.sample


def _step(s: State, a) -> State:
    out = list(s)
    for v, val in a.eff:
        out[v] = val
    return tuple(out)


SAMPLERS = {
    "biased": sample_biased_probes,
    "unbiased": sample_unbiased_probes,
    "pdb": sample_pdb_walk,
}


def draw_sample(method: str, task: Task, ensemble, n: int, d_hat: int, seed: int,
                meter: Meter | None = None) -> Sample:
    try:
        fn = SAMPLERS[method]
    except KeyError:
        raise ValueError(f"unknown sampling method {method!r}; expected one of {METHODS}") from None
    return fn(task, ensemble, n, d_hat, seed, meter)


def estimate_params(sample: Sample, timings: dict[str, Sequence[float]] | None = None,
                    names: Sequence[str] | None = None) -> Estimates:
    """Branching factor, per-heuristic mean call time, mean applied action cost."""
    if not sample.states:
        raise EstimationError("empty sample")
    timings = sample.timings if timings is None else timings
    names = list(timings) if names is None else list(names)
    t = []
    for name in names:
        calls = timings.get(name) or ()
        if not len(calls):
            raise EstimationError(f"no timed calls for heuristic {name!r}")
        t.append(max(float(np.mean(calls)), MIN_TIME))
    b = max(float(np.mean(sample.branching)), MIN_BRANCHING)
    c_hat = float(np.mean(sample.applied_costs)) if sample.applied_costs else sample.fallback_cost
    return Estimates(b, tuple(t), c_hat, sample.d_hat)
