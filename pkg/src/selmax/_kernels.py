"""Hot numeric kernels.

Every kernel has two implementations with identical results: a loop version
compiled with numba ``@njit`` and a vectorised numpy version. ``SELMAX_NUMBA=0``
(or numba being unavailable) selects the numpy path at import time; both paths
stay importable under explicit names for tests and benchmarks.

Relaxed-task layout shared by the heuristic kernels: facts are numbered
``offset[var] + value``; two artificial facts follow (``I`` = every action's
implicit precondition, ``G`` = the goal). Action ``n_actions - 1`` is the
artificial goal action ``pre = goal facts, eff = {G}, cost 0``. Every action
has at least one precondition (``I`` is used when the real one is empty).
"""

from __future__ import annotations

import os

import numpy as np

INF = np.inf
EPS = 1e-9

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SELMAX_NUMBA", "1").lower() not in ("0", "false", "no", "off")


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ------------------------------------------------------------------ heap helpers


def _heap_push(keys, vals, size, key, val):
    i = size
    keys[i] = key
    vals[i] = val
    while i > 0:
        parent = (i - 1) >> 1
        if keys[parent] < keys[i] or (keys[parent] == keys[i] and vals[parent] <= vals[i]):
            break
        keys[parent], keys[i] = keys[i], keys[parent]
        vals[parent], vals[i] = vals[i], vals[parent]
        i = parent
    return size + 1


def _heap_pop(keys, vals, size):
    key = keys[0]
    val = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        small = left
        right = left + 1
        if right < size and (keys[right] < keys[left] or (keys[right] == keys[left] and vals[right] < vals[left])):
            small = right
        if keys[i] < keys[small] or (keys[i] == keys[small] and vals[i] <= vals[small]):
            break
        keys[small], keys[i] = keys[i], keys[small]
        vals[small], vals[i] = vals[i], vals[small]
        i = small
    return key, val, size


_heap_push_j = _njit(_heap_push)
_heap_pop_j = _njit(_heap_pop)


# ------------------------------------------------------------------------ h_max


def _hmax_dijkstra(init_facts, n_facts, pre_start, pre_facts, eff_start, eff_facts,
                   pre_of_start, pre_of_actions, cost, fact_cost, act_reached):
    # Generalised Dijkstra: an action fires once its last precondition is settled.
    n_actions = pre_start.shape[0] - 1
    remaining = np.empty(n_actions, np.int64)
    for a in range(n_actions):
        remaining[a] = pre_start[a + 1] - pre_start[a]
        act_reached[a] = False
    for f in range(n_facts):
        fact_cost[f] = INF
    cap = n_facts + eff_facts.shape[0] + 1
    keys = np.empty(cap, np.float64)
    vals = np.empty(cap, np.int64)
    done = np.zeros(n_facts, np.bool_)
    size = 0
    for i in range(init_facts.shape[0]):
        f = init_facts[i]
        fact_cost[f] = 0.0
        size = _heap_push_j(keys, vals, size, 0.0, f)
    while size > 0:
        c, f, size = _heap_pop_j(keys, vals, size)
        if done[f] or c > fact_cost[f]:
            continue
        done[f] = True
        for k in range(pre_of_start[f], pre_of_start[f + 1]):
            a = pre_of_actions[k]
            remaining[a] -= 1
            if remaining[a] == 0:
                act_reached[a] = True
                ac = c + cost[a]
                for q in range(eff_start[a], eff_start[a + 1]):
                    e = eff_facts[q]
                    if ac < fact_cost[e]:
                        fact_cost[e] = ac
                        size = _heap_push_j(keys, vals, size, ac, e)


_hmax_dijkstra_j = _njit(_hmax_dijkstra)


def _hmax_value(init_facts, n_facts, goal_fact, pre_start, pre_facts, eff_start, eff_facts,
                pre_of_start, pre_of_actions, cost):
    fact_cost = np.empty(n_facts, np.float64)
    reached = np.empty(pre_start.shape[0] - 1, np.bool_)
    _hmax_dijkstra_j(init_facts, n_facts, pre_start, pre_facts, eff_start, eff_facts,
                     pre_of_start, pre_of_actions, cost, fact_cost, reached)
    return fact_cost[goal_fact]


hmax_jit = _njit(_hmax_value)


def _fixpoint_np(init_facts, n_facts, pre_start, pre_facts, eff_start, eff_facts, cost):
    """Least fixpoint of the max-cost equations by synchronous relaxation."""
    fact_cost = np.full(n_facts, INF)
    fact_cost[init_facts] = 0.0
    eff_owner = np.repeat(np.arange(len(cost)), np.diff(eff_start))
    starts = pre_start[:-1]
    while True:
        pre_max = np.maximum.reduceat(fact_cost[pre_facts], starts)
        act_cost = pre_max + cost
        new = fact_cost.copy()
        np.minimum.at(new, eff_facts, act_cost[eff_owner])
        if np.array_equal(new, fact_cost):
            return fact_cost, pre_max
        fact_cost = new


def hmax_np(init_facts, n_facts, goal_fact, pre_start, pre_facts, eff_start, eff_facts,
            pre_of_start, pre_of_actions, cost):
    fact_cost, _ = _fixpoint_np(init_facts, n_facts, pre_start, pre_facts, eff_start, eff_facts, cost)
    return fact_cost[goal_fact]


# ----------------------------------------------------------------------- LM-cut


def _lmcut(init_facts, n_facts, goal_fact, pre_start, pre_facts, eff_start, eff_facts,
           pre_of_start, pre_of_actions, ach_start, ach_actions, base_cost):
    n_actions = pre_start.shape[0] - 1
    cost = base_cost.copy()
    fact_cost = np.empty(n_facts, np.float64)
    reached = np.empty(n_actions, np.bool_)
    pcf = np.empty(n_actions, np.int64)
    in_goal_zone = np.zeros(n_facts, np.bool_)
    in_v0 = np.zeros(n_facts, np.bool_)
    in_cut = np.zeros(n_actions, np.bool_)
    stack = np.empty(n_facts, np.int64)
    cut = np.empty(n_actions, np.int64)
    h = 0.0
    first = True
    while True:
        _hmax_dijkstra_j(init_facts, n_facts, pre_start, pre_facts, eff_start, eff_facts,
                         pre_of_start, pre_of_actions, cost, fact_cost, reached)
        hg = fact_cost[goal_fact]
        if first and hg == INF:
            return INF
        first = False
        if hg <= EPS:
            return h
        # precondition choice function: costliest precondition, lowest fact index on ties
        for a in range(n_actions):
            best = -1
            bc = -1.0
            if reached[a]:
                for k in range(pre_start[a], pre_start[a + 1]):
                    p = pre_facts[k]
                    if fact_cost[p] > bc:
                        bc = fact_cost[p]
                        best = p
            pcf[a] = best
        # goal zone: facts with a zero-cost justification path to G
        for f in range(n_facts):
            in_goal_zone[f] = False
            in_v0[f] = False
        in_goal_zone[goal_fact] = True
        top = 0
        stack[top] = goal_fact
        top += 1
        while top > 0:
            top -= 1
            e = stack[top]
            for k in range(ach_start[e], ach_start[e + 1]):
                a = ach_actions[k]
                if reached[a] and cost[a] <= EPS:
                    p = pcf[a]
                    if not in_goal_zone[p]:
                        in_goal_zone[p] = True
                        stack[top] = p
                        top += 1
        # facts reachable from the state without entering the goal zone
        top = 0
        for i in range(init_facts.shape[0]):
            f = init_facts[i]
            if not in_v0[f]:
                in_v0[f] = True
                stack[top] = f
                top += 1
        ncut = 0
        while top > 0:
            top -= 1
            f = stack[top]
            for k in range(pre_of_start[f], pre_of_start[f + 1]):
                a = pre_of_actions[k]
                if not reached[a] or pcf[a] != f:
                    continue
                for q in range(eff_start[a], eff_start[a + 1]):
                    e = eff_facts[q]
                    if in_goal_zone[e]:
                        if not in_cut[a]:
                            in_cut[a] = True
                            cut[ncut] = a
                            ncut += 1
                    elif not in_v0[e]:
                        in_v0[e] = True
                        stack[top] = e
                        top += 1
        m = INF
        for i in range(ncut):
            if cost[cut[i]] < m:
                m = cost[cut[i]]
        h += m
        for i in range(ncut):
            a = cut[i]
            in_cut[a] = False
            c = cost[a] - m
            cost[a] = c if c > EPS else 0.0


lmcut_jit = _njit(_lmcut)


def lmcut_np(init_facts, n_facts, goal_fact, pre_start, pre_facts, eff_start, eff_facts,
             pre_of_start, pre_of_actions, ach_start, ach_actions, base_cost):
    n_actions = len(base_cost)
    cost = base_cost.astype(np.float64).copy()
    eff_owner = np.repeat(np.arange(n_actions), np.diff(eff_start))
    pre_owner = np.repeat(np.arange(n_actions), np.diff(pre_start))
    h = 0.0
    first = True
    while True:
        fact_cost, pre_max = _fixpoint_np(init_facts, n_facts, pre_start, pre_facts,
                                          eff_start, eff_facts, cost)
        hg = fact_cost[goal_fact]
        if first and hg == INF:
            return INF
        first = False
        if hg <= EPS:
            return h
        reached = pre_max < INF
        # first (lowest-index) precondition attaining the maximum
        hits = np.flatnonzero(fact_cost[pre_facts] == pre_max[pre_owner])
        pcf = pre_facts[hits[np.searchsorted(hits, pre_start[:-1])]]
        src = pcf[eff_owner]
        live = reached[eff_owner]
        zero = live & (cost[eff_owner] <= EPS)
        goal_zone = np.zeros(n_facts, bool)
        goal_zone[goal_fact] = True
        while True:
            grow = zero & goal_zone[eff_facts] & ~goal_zone[src]
            if not grow.any():
                break
            goal_zone[src[grow]] = True
        v0 = np.zeros(n_facts, bool)
        v0[init_facts] = True
        while True:
            grow = live & v0[src] & ~goal_zone[eff_facts] & ~v0[eff_facts]
            if not grow.any():
                break
            v0[eff_facts[grow]] = True
        cut_edges = live & v0[src] & goal_zone[eff_facts]
        cut = np.unique(eff_owner[cut_edges])
        m = cost[cut].min()
        h += m
        c = cost[cut] - m
        cost[cut] = np.where(c > EPS, c, 0.0)


# ------------------------------------------------------ abstract-space Dijkstra


def _backward_dijkstra(n_states, goal_states, rev_start, rev_src, rev_cost, dist):
    for i in range(n_states):
        dist[i] = INF
    cap = n_states + rev_src.shape[0] + 1
    keys = np.empty(cap, np.float64)
    vals = np.empty(cap, np.int64)
    size = 0
    for i in range(goal_states.shape[0]):
        g = goal_states[i]
        dist[g] = 0.0
        size = _heap_push_j(keys, vals, size, 0.0, g)
    while size > 0:
        d, u, size = _heap_pop_j(keys, vals, size)
        if d > dist[u]:
            continue
        for k in range(rev_start[u], rev_start[u + 1]):
            v = rev_src[k]
            nd = d + rev_cost[k]
            if nd < dist[v]:
                dist[v] = nd
                size = _heap_push_j(keys, vals, size, nd, v)


backward_dijkstra_jit = _njit(_backward_dijkstra)


def backward_dijkstra_np(n_states, goal_states, rev_start, rev_src, rev_cost, dist):
    dst = np.repeat(np.arange(n_states), np.diff(rev_start))
    dist[:] = INF
    dist[goal_states] = 0.0
    while True:
        new = dist.copy()
        np.minimum.at(new, rev_src, dist[dst] + rev_cost)
        if np.array_equal(new, dist):
            return
        dist[:] = new


# ------------------------------------------------------------------ Naive Bayes


def _nb_log_joint(counts, class_counts, offsets, domain_sizes, x, out):
    total = class_counts[0] + class_counts[1]
    for c in range(2):
        cc = class_counts[c]
        acc = np.log((cc + 1.0) / (total + 2.0))
        for v in range(x.shape[0]):
            acc += np.log(counts[offsets[v] + x[v], c] + 1.0) - np.log(cc + domain_sizes[v])
        out[c] = acc


nb_log_joint_jit = _njit(_nb_log_joint)


def nb_log_joint_np(counts, class_counts, offsets, domain_sizes, x, out):
    total = class_counts.sum()
    rows = counts[offsets + x]
    for c in range(2):
        cc = class_counts[c]
        out[c] = (np.log((cc + 1.0) / (total + 2.0))
                  + np.sum(np.log(rows[:, c] + 1.0) - np.log(cc + domain_sizes)))


# ------------------------------------------------------------------- selection

if USE_NUMBA:
    hmax_kernel = hmax_jit
    lmcut_kernel = lmcut_jit
    backward_dijkstra = backward_dijkstra_jit
    nb_log_joint = nb_log_joint_jit
else:
    hmax_kernel = hmax_np
    lmcut_kernel = lmcut_np
    backward_dijkstra = backward_dijkstra_np
    nb_log_joint = nb_log_joint_np

BACKEND = "numba" if USE_NUMBA else "numpy"
