"""Parametric task generators (desk-scale stand-ins for benchmark domains)."""

from __future__ import annotations

import numpy as np

from .task import Action, Task, Variable, make_assignment

DOMAINS = ("gripper", "chain-branch", "transport-lite")


def gripper(n: int) -> Task:
    """Robot with two grippers moving ``n`` balls from room a to room b."""
    rooms = ("rooma", "roomb")
    grippers = ("left", "right")
    variables = [Variable("robot", rooms)]
    variables += [Variable(f"{g}-hand", ("free", "busy")) for g in grippers]
    variables += [Variable(f"ball{i}", rooms + tuple(f"in-{g}" for g in grippers)) for i in range(n)]
    ball = lambda i: 3 + i  # noqa: E731
    actions = [
        Action("move-rooma-roomb", ((0, 0),), ((0, 1),), 1.0),
        Action("move-roomb-rooma", ((0, 1),), ((0, 0),), 1.0),
    ]
    for i in range(n):
        for r, room in enumerate(rooms):
            for g, hand in enumerate(grippers):
                held = 2 + g
                actions.append(Action(
                    f"pick-ball{i}-{room}-{hand}",
                    make_assignment([(0, r), (1 + g, 0), (ball(i), r)]),
                    make_assignment([(1 + g, 1), (ball(i), held)]), 1.0))
                actions.append(Action(
                    f"drop-ball{i}-{room}-{hand}",
                    make_assignment([(0, r), (ball(i), held)]),
                    make_assignment([(1 + g, 0), (ball(i), r)]), 1.0))
    init = (0, 0, 0) + (0,) * n
    goal = tuple((ball(i), 1) for i in range(n))
    return Task(tuple(variables), tuple(actions), init, goal, name=f"gripper-{n}")


def chain_branch(chains: int, length: int, toggles: int = 0, lock: bool = False,
                 jumps: int = 0, toggle_cost: float = 1.0, seed: int = 0, name: str | None = None,
                 reversible: bool = False) -> Task:
    """Independent counters that must each reach ``length``.

    ``toggles`` adds goal-irrelevant binary switches (branching). With ``lock``
    every counter step needs a shared lock open and closes it again, which makes
    every delete-relaxation heuristic lose about half of the true cost.
    ``jumps`` adds random two-step shortcuts with random cost in {2, 3}.
    ``reversible`` lets every counter also step back, so random walks do not
    all drain into the goal.
    """
    rng = np.random.default_rng(seed)
    variables = [Variable(f"c{i}", tuple(f"p{k}" for k in range(length + 1))) for i in range(chains)]
    base = chains
    if lock:
        variables.append(Variable("lock", ("open", "closed")))
    lock_var = base if lock else None
    tog0 = base + (1 if lock else 0)
    variables += [Variable(f"t{j}", ("off", "on")) for j in range(toggles)]
    actions = []
    for i in range(chains):
        for k in range(length):
            pre = [(i, k)]
            eff = [(i, k + 1)]
            if lock:
                pre.append((lock_var, 0))
                eff.append((lock_var, 1))
            actions.append(Action(f"step-c{i}-{k}", make_assignment(pre), make_assignment(eff), 1.0))
            if reversible:
                actions.append(Action(f"back-c{i}-{k + 1}", ((i, k + 1),), ((i, k),), 1.0))
    for _ in range(jumps):
        i = int(rng.integers(chains))
        if length < 2:
            break
        k = int(rng.integers(length - 1))
        c = float(rng.integers(2, 4))
        actions.append(Action(f"jump-c{i}-{k}-{len(actions)}", ((i, k),), ((i, k + 2),), c))
    if lock:
        actions.append(Action("open-lock", ((lock_var, 1),), ((lock_var, 0),), 1.0))
    for j in range(toggles):
        v = tog0 + j
        actions.append(Action(f"on-t{j}", ((v, 0),), ((v, 1),), toggle_cost))
        actions.append(Action(f"off-t{j}", ((v, 1),), ((v, 0),), toggle_cost))
    init = (0,) * chains + ((1,) if lock else ()) + (0,) * toggles
    goal = tuple((i, length) for i in range(chains))
    label = name or f"chain-branch-{chains}x{length}-t{toggles}{'-lock' if lock else ''}-j{jumps}-s{seed}"
    return Task(tuple(variables), tuple(actions), init, goal, name=label)


def transport_lite(n_locations: int, n_packages: int, seed: int = 0) -> Task:
    """One truck on a weighted ring-with-chords road map delivering packages."""
    rng = np.random.default_rng(seed)
    locs = [f"l{i}" for i in range(n_locations)]
    roads = {}
    for i in range(n_locations):
        j = (i + 1) % n_locations
        if i != j:
            roads[tuple(sorted((i, j)))] = None
    for _ in range(max(0, n_locations - 3)):
        i, j = (int(x) for x in rng.choice(n_locations, size=2, replace=False))
        roads[tuple(sorted((i, j)))] = None
    for edge in sorted(roads):
        roads[edge] = float(rng.integers(1, 6))
    # at least two distinct road costs
    costs = set(roads.values())
    if len(costs) < 2 and roads:
        first = sorted(roads)[0]
        roads[first] = 1.0 if roads[first] != 1.0 else 4.0

    variables = [Variable("truck", tuple(locs))]
    variables += [Variable(f"pkg{p}", tuple(locs) + ("in-truck",)) for p in range(n_packages)]
    actions = []
    for (i, j), c in sorted(roads.items()):
        actions.append(Action(f"drive-l{i}-l{j}", ((0, i),), ((0, j),), c))
        actions.append(Action(f"drive-l{j}-l{i}", ((0, j),), ((0, i),), c))
    origins = rng.integers(n_locations, size=n_packages)
    dests = (origins + rng.integers(1, n_locations, size=n_packages)) % n_locations
    for p in range(n_packages):
        v = 1 + p
        for li in range(n_locations):
            actions.append(Action(f"load-pkg{p}-l{li}", make_assignment([(0, li), (v, li)]),
                                  ((v, n_locations),), 1.0))
            actions.append(Action(f"unload-pkg{p}-l{li}", make_assignment([(0, li), (v, n_locations)]),
                                  ((v, li),), 1.0))
    truck0 = int(rng.integers(n_locations))
    init = (truck0,) + tuple(int(o) for o in origins)
    goal = tuple((1 + p, int(d)) for p, d in enumerate(dests))
    return Task(tuple(variables), tuple(actions), init, goal,
                name=f"transport-lite-{n_locations}x{n_packages}-s{seed}")


def gen_domain(name: str, size: int, seed: int = 0) -> Task:
    if size < 1:
        raise ValueError("size must be >= 1")
    rng = np.random.default_rng([seed, size])
    if name == "gripper":
        return gripper(size)
    if name == "chain-branch":
        chains = 1 + (size - 1) % 3
        length = 2 + int(rng.integers(0, 2 + size // 3))
        toggles = int(rng.integers(0, 3))
        lock = bool(rng.integers(0, 2))
        jumps = int(rng.integers(0, 3))
        cap = 20_000 if size <= 9 else 100_000
        while (length + 1) ** chains * 2 ** toggles * (2 if lock else 1) > cap:
            length -= 1
        t = chain_branch(chains, length, toggles, lock, jumps, seed=seed)
        return Task(t.variables, t.actions, t.init, t.goal, name=f"chain-branch-{size}-s{seed}")
    if name == "transport-lite":
        if size <= 12:
            return transport_lite(3 + (size - 1) % 4, 1 + (size - 1) // 4, seed=seed)
        # larger instances: 6-10 locations, 4-7 packages
        return transport_lite(6 + (size - 13) % 5, min(4 + (size - 13) // 5, 7), seed=seed)
    raise ValueError(f"unknown domain {name!r}; expected one of {DOMAINS}")


def chain_lock(size: int) -> Task:
    """Three counters behind one shared lock: both relaxation heuristics stay weak."""
    return chain_branch(3, 5 + size % 3, toggles=1 + size // 3, lock=True, name=f"chain-lock-{size}")


# Families for the cheap-vs-expensive evaluation-cost experiment.

def family_deep(size: int) -> Task:
    """One long counter among many irrelevant switches: h_max is already perfect."""
    return chain_branch(1, 20 + 4 * size, toggles=20 + 2 * size, name=f"deep-{size}")


def family_disjoint(size: int) -> Task:
    """Independent counters: LM-cut adds them up, h_max sees only the longest."""
    return chain_branch(2 + size % 2, 8 + 2 * size, toggles=1, reversible=True, name=f"disjoint-{size}")
