"""Admissible heuristics behind one calling convention: ``h(state) -> float``.

A dead end is reported as ``math.inf`` (``DEAD_END``), which orders above every
finite estimate.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .task import State, Task

DEAD_END = math.inf
DEFAULT_PDB_LIMIT = 1_000_000


class PatternTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class RelaxedTask:
    """Flat array view of the delete relaxation, in the layout ``_kernels`` expects."""

    offsets: np.ndarray
    n_facts: int  # including the two artificial facts
    init_fact: int
    goal_fact: int
    pre_start: np.ndarray
    pre_facts: np.ndarray
    eff_start: np.ndarray
    eff_facts: np.ndarray
    pre_of_start: np.ndarray
    pre_of_actions: np.ndarray
    ach_start: np.ndarray
    ach_actions: np.ndarray
    cost: np.ndarray

    @classmethod
    def from_task(cls, task: Task) -> "RelaxedTask":
        sizes = np.array(task.domain_sizes, dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        n_real = int(sizes.sum())
        init_fact, goal_fact = n_real, n_real + 1
        pre_lists, eff_lists, costs = [], [], []
        for a in task.actions:
            pre_lists.append([int(offsets[v]) + val for v, val in a.pre] or [init_fact])
            eff_lists.append([int(offsets[v]) + val for v, val in a.eff])
            costs.append(a.cost)
        pre_lists.append([int(offsets[v]) + val for v, val in task.goal] or [init_fact])
        eff_lists.append([goal_fact])
        costs.append(0.0)
        n_facts = n_real + 2

        def csr(lists):
            start = np.zeros(len(lists) + 1, dtype=np.int64)
            start[1:] = np.cumsum([len(x) for x in lists])
            flat = np.array([f for x in lists for f in x], dtype=np.int64)
            return start, flat

        def invert(lists):
            inv: list[list[int]] = [[] for _ in range(n_facts)]
            for a, facts in enumerate(lists):
                for f in facts:
                    inv[f].append(a)
            return csr(inv)

        pre_start, pre_facts = csr(pre_lists)
        eff_start, eff_facts = csr(eff_lists)
        pre_of_start, pre_of_actions = invert(pre_lists)
        ach_start, ach_actions = invert(eff_lists)
        return cls(offsets, n_facts, init_fact, goal_fact, pre_start, pre_facts, eff_start,
                   eff_facts, pre_of_start, pre_of_actions, ach_start, ach_actions,
                   np.array(costs, dtype=np.float64))


class Heuristic:
    name = "h"

    def __call__(self, s: State) -> float:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Blind(Heuristic):
    """0 on goal states, otherwise the cheapest action cost."""

    name = "blind"

    def __init__(self, task: Task):
        self.task = task
        self.min_cost = task.min_action_cost

    def __call__(self, s: State) -> float:
        return 0.0 if self.task.is_goal(s) else self.min_cost


class _RelaxedHeuristic(Heuristic):
    def __init__(self, task: Task, relaxed: RelaxedTask | None = None, use_numba: bool | None = None):
        self.task = task
        self.rt = relaxed or RelaxedTask.from_task(task)
        self._facts = np.empty(len(task.variables) + 1, dtype=np.int64)
        self._facts[-1] = self.rt.init_fact
        self.use_numba = K.USE_NUMBA if use_numba is None else use_numba and K.HAVE_NUMBA
        if self.use_numba:
            self(task.init)  # load the compiled kernel now, not inside the first timed call

    def init_facts(self, s: State) -> np.ndarray:
        buf = self._facts
        buf[:-1] = s
        buf[:-1] += self.rt.offsets
        return buf


class HMax(_RelaxedHeuristic):
    name = "hmax"

    def __call__(self, s: State) -> float:
        rt = self.rt
        kernel = K.hmax_jit if self.use_numba else K.hmax_np
        return float(kernel(self.init_facts(s), rt.n_facts, rt.goal_fact, rt.pre_start, rt.pre_facts,
                            rt.eff_start, rt.eff_facts, rt.pre_of_start, rt.pre_of_actions, rt.cost))


class LMCut(_RelaxedHeuristic):
    name = "lmcut"

    def __call__(self, s: State) -> float:
        rt = self.rt
        kernel = K.lmcut_jit if self.use_numba else K.lmcut_np
        return float(kernel(self.init_facts(s), rt.n_facts, rt.goal_fact, rt.pre_start, rt.pre_facts,
                            rt.eff_start, rt.eff_facts, rt.pre_of_start, rt.pre_of_actions,
                            rt.ach_start, rt.ach_actions, rt.cost))


class PDB(Heuristic):
    """Pattern database: exact goal distances in the projection onto ``pattern``."""

    def __init__(self, task: Task, pattern: Sequence[int], max_size: int = DEFAULT_PDB_LIMIT,
                 use_numba: bool | None = None):
        self.task = task
        self.pattern = tuple(sorted(set(pattern)))
        self.name = "pdb:" + "+".join(map(str, self.pattern))
        sizes = [task.variables[v].domain_size for v in self.pattern]
        n = math.prod(sizes)
        if n > max_size:
            raise PatternTooLargeError(f"pattern {self.pattern} has {n} abstract states > {max_size}")
        mult = [1] * len(sizes)
        for i in range(len(sizes) - 2, -1, -1):
            mult[i] = mult[i + 1] * sizes[i + 1]
        self.mult = tuple(mult)
        self.table = build_pdb(task, self.pattern, sizes, mult, use_numba)

    def rank(self, s: State) -> int:
        return sum(s[v] * m for v, m in zip(self.pattern, self.mult))

    def __call__(self, s: State) -> float:
        return float(self.table[self.rank(s)])


def build_pdb(task: Task, pattern: tuple[int, ...], sizes: list[int], mult: list[int],
              use_numba: bool | None = None) -> np.ndarray:
    n = math.prod(sizes)
    pos = {v: i for i, v in enumerate(pattern)}
    ranks = np.arange(n, dtype=np.int64)
    vals = [(ranks // m) % k for m, k in zip(mult, sizes)]
    srcs, dsts, costs = [], [], []
    for a in task.actions:
        eff = [(pos[v], val) for v, val in a.eff if v in pos]
        if not eff:
            continue
        mask = np.ones(n, dtype=bool)
        for v, val in a.pre:
            if v in pos:
                mask &= vals[pos[v]] == val
        src = ranks[mask]
        dst = src.copy()
        for i, val in eff:
            dst += (val - vals[i][mask]) * mult[i]
        keep = src != dst
        srcs.append(src[keep])
        dsts.append(dst[keep])
        costs.append(np.full(int(keep.sum()), a.cost))
    goal = np.ones(n, dtype=bool)
    for v, val in task.goal:
        if v in pos:
            goal &= vals[pos[v]] == val
    if srcs:
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
        cost = np.concatenate(costs).astype(np.float64)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
        cost = np.zeros(0)
    order = np.argsort(dst, kind="stable")
    rev_start = np.zeros(n + 1, dtype=np.int64)
    rev_start[1:] = np.cumsum(np.bincount(dst, minlength=n))
    dist = np.empty(n, dtype=np.float64)
    use = K.USE_NUMBA if use_numba is None else use_numba and K.HAVE_NUMBA
    kernel = K.backward_dijkstra_jit if use else K.backward_dijkstra_np
    kernel(n, np.flatnonzero(goal).astype(np.int64), rev_start, src[order].astype(np.int64),
           cost[order], dist)
    return dist


def pdb_build(task: Task, pattern: Sequence[int], max_size: int = DEFAULT_PDB_LIMIT) -> PDB:
    return PDB(task, pattern, max_size)


def pdb_lookup(table: PDB, s: State) -> float:
    return table(s)


# ------------------------------------------------------------ relaxed planning


def relaxed_exploration(task: Task, s: State) -> tuple[dict[tuple[int, int], float], dict[tuple[int, int], int]]:
    """h_max fact costs and best supporters by generalised Dijkstra.

    A fact's supporter is the achiever that first gave it its final cost; among
    achievers fired at equal cost before the fact is settled, the lowest action
    index wins. Supporters are therefore acyclic even with zero-cost actions.
    """
    cost: dict[tuple[int, int], float] = {}
    support: dict[tuple[int, int], int] = {}
    settled: set[tuple[int, int]] = set()
    remaining = [len(a.pre) for a in task.actions]
    waiting: dict[tuple[int, int], list[int]] = {}
    for i, a in enumerate(task.actions):
        for p in a.pre:
            waiting.setdefault(p, []).append(i)
    heap: list[tuple[float, tuple[int, int]]] = []

    def fire(i: int, base: float) -> None:
        a = task.actions[i]
        c = base + a.cost
        for e in a.eff:
            old = cost.get(e, math.inf)
            if e in settled:
                continue
            if c < old or (c == old and i < support.get(e, math.inf)):
                cost[e] = c
                support[e] = i
                heapq.heappush(heap, (c, e))

    for v, val in enumerate(s):
        cost[(v, val)] = 0.0
        heapq.heappush(heap, (0.0, (v, val)))
    for i, a in enumerate(task.actions):
        if not a.pre:
            fire(i, 0.0)
    while heap:
        c, f = heapq.heappop(heap)
        if f in settled or c > cost[f]:
            continue
        settled.add(f)
        for i in waiting.get(f, ()):
            remaining[i] -= 1
            if remaining[i] == 0:
                fire(i, c)
    return cost, support


def hmax_reference(task: Task, s: State) -> float:
    cost, _ = relaxed_exploration(task, s)
    return max((cost.get(g, math.inf) for g in task.goal), default=0.0)


def relaxed_plan_length(task: Task, s: State) -> float:
    """Number of actions in the best-supporter relaxed plan (``inf`` if unsolvable)."""
    cost, support = relaxed_exploration(task, s)
    if any(g not in cost for g in task.goal):
        return DEAD_END
    plan: set[int] = set()
    open_facts = [g for g in task.goal if s[g[0]] != g[1]]
    seen = set(open_facts)
    while open_facts:
        f = open_facts.pop()
        i = support[f]
        if i in plan:
            continue
        plan.add(i)
        for p in task.actions[i].pre:
            if s[p[0]] != p[1] and p not in seen:
                seen.add(p)
                open_facts.append(p)
    return len(plan)


# ------------------------------------------------------------------- ensembles


def make_heuristic(spec: str, task: Task, relaxed: RelaxedTask | None = None) -> Heuristic:
    spec = spec.strip()
    if spec == "blind":
        return Blind(task)
    if spec == "hmax":
        return HMax(task, relaxed)
    if spec == "lmcut":
        return LMCut(task, relaxed)
    if spec.startswith("pdb:"):
        body = spec[4:]
        names = {v.name: i for i, v in enumerate(task.variables)}
        if body == "all":
            pattern = list(range(len(task.variables)))
        else:
            pattern = []
            for tok in filter(None, body.split("+")):
                pattern.append(int(tok) if tok.isdigit() else names[tok])
        return PDB(task, pattern)
    raise ValueError(f"unknown heuristic {spec!r}")


def parse_ensemble(spec: str, task: Task) -> list[Heuristic]:
    """Build heuristics from a comma list such as ``"hmax,lmcut,pdb:0+2"``."""
    relaxed = RelaxedTask.from_task(task)
    return [make_heuristic(part, task, relaxed) for part in spec.split(",") if part.strip()]
