"""Reference implementations used only by the tests.

Everything here is written against plain dicts and lists, deliberately not
sharing code with the package, so that agreement means something.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product


def naive_applicable(state, action) -> bool:
    pre = dict(action.pre)
    for var in range(len(state)):
        if var in pre and pre[var] != state[var]:
            return False
    return True


def naive_apply(state, action):
    out = list(state)
    for var, val in action.eff:
        out[var] = val
    return tuple(out)


def naive_is_goal(state, goal) -> bool:
    return all(state[v] == val for v, val in goal)


def all_states(task):
    return list(product(*[range(v.domain_size) for v in task.variables]))


def naive_successors(task, state):
    return [(a, naive_apply(state, a)) for a in task.actions if naive_applicable(state, a)]


def hstar_value_iteration(task):
    """h* over the reachable states by Bellman-Ford style relaxation."""
    seen = {task.init}
    frontier = [task.init]
    edges = {}
    while frontier:
        nxt = []
        for s in frontier:
            edges[s] = [(a.cost, t) for a, t in naive_successors(task, s)]
            for _, t in edges[s]:
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    h = {s: (0.0 if naive_is_goal(s, task.goal) else math.inf) for s in seen}
    changed = True
    while changed:
        changed = False
        for s, out in edges.items():
            for c, t in out:
                if c + h[t] < h[s]:
                    h[s] = c + h[t]
                    changed = True
    return h


def nb_posterior(examples, x, domain_sizes):
    """Exact Laplace-1 Naive Bayes class scores and winner posterior with Fractions."""
    total = len(examples)
    scores = []
    for y in (0, 1):
        cls = [e for e, lab in examples if lab == y]
        p = Fraction(len(cls) + 1, total + 2)
        for var, dom in enumerate(domain_sizes):
            hits = sum(1 for e in cls if e[var] == x[var])
            p *= Fraction(hits + 1, len(cls) + dom)
        scores.append(p)
    winner = 1 if scores[1] > scores[0] else 0
    return winner, scores[winner] / (scores[0] + scores[1]), scores


def knn_brute(points, labels, x, k):
    d = [(sum((a - b) ** 2 for a, b in zip(p, x)), i) for i, p in enumerate(points)]
    d.sort()
    votes = sum(labels[i] for _, i in d[:k])
    label = 1 if 2 * votes > k else 0
    won = votes if label else k - votes
    return label, won / k


def interruptible_schedule(times, limit):
    """Round r gives every entry 2**(r-1) seconds in the listed order."""
    used = 0.0
    r = 0
    while True:
        slot = 2.0 ** r
        progress = False
        for t in times:
            if used >= limit:
                return None
            if t <= slot:
                return used + t if used + t <= limit else None
            used += slot
            progress = True
        r += 1
        if not progress or used > limit:
            return None


def hmax_fixpoint(task, state):
    """Delete-relaxed max costs by plain Bellman iteration over facts."""
    cost = {(v, val): 0.0 for v, val in enumerate(state)}
    changed = True
    while changed:
        changed = False
        for a in task.actions:
            pre = [cost.get(p, math.inf) for p in a.pre]
            base = max(pre, default=0.0)
            if base == math.inf:
                continue
            for e in a.eff:
                if base + a.cost < cost.get(e, math.inf):
                    cost[e] = base + a.cost
                    changed = True
    return max((cost.get(g, math.inf) for g in task.goal), default=0.0)
