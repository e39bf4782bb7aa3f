"""A* with reopening, plus exhaustive oracles used by the tests and the harness."""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

from .metering import Meter, clock
from .task import State, Task

Evaluator = Callable[[State], float]
DEFAULT_ORACLE_LIMIT = 100_000


class Status(str, enum.Enum):
    SOLVED = "SOLVED"
    EXHAUSTED_UNSOLVABLE = "EXHAUSTED_UNSOLVABLE"
    TIMEOUT = "TIMEOUT"
    MEMOUT = "MEMOUT"


class StateSpaceTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class Limits:
    time: float | None = None  # seconds of wall clock
    expansions: int | None = None
    nodes: int | None = None  # stored states, a proxy for memory


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    evaluated: int = 0
    reopened: int = 0
    search_time: float = 0.0
    heuristic_calls: dict[str, int] = field(default_factory=dict)
    heuristic_time: dict[str, float] = field(default_factory=dict)
    classify_time: float = 0.0
    update_time: float = 0.0
    sampling_time: float = 0.0
    labeling_time: float = 0.0
    total_time: float = 0.0
    abstract_time: bool = False

    @property
    def overhead_time(self) -> float:
        return self.classify_time + self.update_time + self.sampling_time + self.labeling_time

    @property
    def overhead_fraction(self) -> float:
        if self.total_time <= 0:
            return 0.0
        return min(1.0, max(0.0, self.overhead_time / self.total_time))

    def absorb(self, meter: Meter, setup_time: float = 0.0) -> None:
        """Copy an evaluator's meter in and settle the totals."""
        self.heuristic_calls = dict(sorted(meter.calls.items()))
        self.heuristic_time = dict(sorted(meter.times.items()))
        self.classify_time = meter.classify_time
        self.update_time = meter.update_time
        self.sampling_time = meter.sampling_time
        self.labeling_time = meter.labeling_time
        self.abstract_time = meter.abstract
        if meter.abstract:
            # sampling_time is made of heuristic calls, already inside heuristic_time
            self.total_time = (meter.heuristic_time + meter.classify_time + meter.update_time
                               + meter.labeling_time)
        else:
            self.total_time = self.search_time + setup_time


@dataclass
class SearchResult:
    status: Status
    plan: list[int] | None
    cost: float | None
    stats: SearchStats

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


def astar(task: Task, evaluator: Evaluator, limits: Limits | None = None) -> SearchResult:
    """A* on f = g + h; ties go to larger g, then to earlier insertion.

    States are evaluated once, at generation. A cheaper path to a closed state
    reopens it, so admissible but inconsistent evaluators still give optimal plans.
    """
    limits = limits or Limits()
    stats = SearchStats()
    t0 = clock()
    deadline = t0 + limits.time if limits.time is not None else math.inf
    counter = itertools.count()
    init = task.init
    h_cache: dict[State, float] = {}
    best_g: dict[State, float] = {init: 0.0}
    parent: dict[State, tuple[State, int] | None] = {init: None}
    closed: set[State] = set()
    actions = task.actions

    def finish(status: Status, plan=None, cost=None) -> SearchResult:
        stats.search_time = clock() - t0
        stats.total_time = stats.search_time
        return SearchResult(status, plan, cost, stats)

    h0 = evaluator(init)
    stats.evaluated += 1
    h_cache[init] = h0
    if h0 == math.inf:
        return finish(Status.EXHAUSTED_UNSOLVABLE)
    open_list = [(h0, -0.0, next(counter), init)]
    while open_list:
        f, neg_g, _, s = heapq.heappop(open_list)
        g = -neg_g
        if g > best_g[s]:
            continue
        if task.is_goal(s):
            plan = []
            node = s
            while parent[node] is not None:
                node, a = parent[node]
                plan.append(a)
            plan.reverse()
            return finish(Status.SOLVED, plan, g)
        if s in closed:
            stats.reopened += 1
        closed.add(s)
        stats.expanded += 1
        if limits.expansions is not None and stats.expanded > limits.expansions:
            return finish(Status.TIMEOUT)
        if clock() > deadline:
            return finish(Status.TIMEOUT)
        for ai, t in task.successor_ids(s):
            stats.generated += 1
            ng = g + actions[ai].cost
            if ng >= best_g.get(t, math.inf):
                continue
            best_g[t] = ng
            parent[t] = (s, ai)
            h = h_cache.get(t)
            if h is None:
                h = evaluator(t)
                stats.evaluated += 1
                h_cache[t] = h
            if h == math.inf:
                continue
            heapq.heappush(open_list, (ng + h, -ng, next(counter), t))
        if limits.nodes is not None and len(best_g) > limits.nodes:
            return finish(Status.MEMOUT)
    return finish(Status.EXHAUSTED_UNSOLVABLE)


# ------------------------------------------------------------------- oracles


@dataclass
class OracleResult:
    cost: float  # math.inf when unsolvable
    hstar: dict[State, float]
    states: list[State]

    @property
    def solvable(self) -> bool:
        return self.cost < math.inf


def reachable_graph(task: Task, max_states: int = DEFAULT_ORACLE_LIMIT):
    """Breadth-first enumeration: (states, forward edges as (action, succ) lists)."""
    index = {task.init: 0}
    states = [task.init]
    edges: list[list[tuple[int, int]]] = []
    i = 0
    while i < len(states):
        s = states[i]
        out = []
        for ai, t in task.successor_ids(s):
            j = index.get(t)
            if j is None:
                if len(states) >= max_states:
                    raise StateSpaceTooLarge(f"more than {max_states} reachable states")
                j = index[t] = len(states)
                states.append(t)
            out.append((ai, j))
        edges.append(out)
        i += 1
    return states, edges


def dijkstra_oracle(task: Task, max_states: int = DEFAULT_ORACLE_LIMIT) -> OracleResult:
    """Exact h* for every reachable state via backward Dijkstra from all goal states."""
    states, edges = reachable_graph(task, max_states)
    reverse: list[list[tuple[int, float]]] = [[] for _ in states]
    for i, out in enumerate(edges):
        for ai, j in out:
            reverse[j].append((i, task.actions[ai].cost))
    dist = [math.inf] * len(states)
    heap = []
    for i, s in enumerate(states):
        if task.is_goal(s):
            dist[i] = 0.0
            heap.append((0.0, i))
    heapq.heapify(heap)
    while heap:
        d, j = heapq.heappop(heap)
        if d > dist[j]:
            continue
        for i, c in reverse[j]:
            nd = d + c
            if nd < dist[i]:
                dist[i] = nd
                heapq.heappush(heap, (nd, i))
    hstar = {s: dist[i] for i, s in enumerate(states)}
    return OracleResult(dist[0], hstar, states)


def optimal_cost(task: Task, max_states: int = DEFAULT_ORACLE_LIMIT) -> float:
    return dijkstra_oracle(task, max_states).cost


def g_star(task: Task, max_states: int = DEFAULT_ORACLE_LIMIT) -> dict[State, float]:
    """Cheapest cost from the initial state to every reachable state."""
    states, edges = reachable_graph(task, max_states)
    dist = [math.inf] * len(states)
    dist[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        d, i = heapq.heappop(heap)
        if d > dist[i]:
            continue
        for ai, j in edges[i]:
            nd = d + task.actions[ai].cost
            if nd < dist[j]:
                dist[j] = nd
                heapq.heappush(heap, (nd, j))
    return {s: dist[i] for i, s in enumerate(states)}


def surely_expanded_count(task: Task, h: Evaluator, c_star: float,
                          max_states: int = DEFAULT_ORACLE_LIMIT) -> int:
    """Number of reachable states with g*(s) + h(s) < c*."""
    return sum(1 for s, g in g_star(task, max_states).items() if g + h(s) < c_star)
