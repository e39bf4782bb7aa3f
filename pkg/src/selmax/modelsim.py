"""Idealized search-space model: a b-ary tree with one goal and two controllable heuristics.

Node addressing: ``("path", d)`` is the node at depth ``d`` on the optimal path
(the goal is ``("path", c_star)``); ``("off", k, sib, j)`` lies ``j >= 1`` levels
below the ``sib``-th non-path child of ``("path", k)``. All nodes of one
off-path subtree at the same ``j`` share their heuristic values, so whole
levels are simulated at once and nothing is materialised.

Distances are measured in the undirected tree, so an off-path node has
``h* = j + c_star - k``.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Union

import numpy as np

H1, H2 = 0, 1
MAX_FRONTIER = 16
MAX_C_STAR = 12

Node = tuple
Num = Union[int, Fraction]


class Profile(str, enum.Enum):
    CONSTANT_H1 = "CONSTANT_H1"  # h1 frozen below the frontier
    CONSTANT_ABS_ERR = "CONSTANT_ABS_ERR"  # h1 keeps pace with h*
    ADDITIVE_C = "ADDITIVE_C"  # h1 grows by c in (0, 1) per level


class Rule(str, enum.Enum):
    DR_OPT = "DR_OPT"
    ALWAYS_H1 = "ALWAYS_H1"
    ALWAYS_H2 = "ALWAYS_H2"


class ModelError(ValueError):
    pass


ADDITIVE_RATES = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))


@dataclass(frozen=True)
class ModelInstance:
    b: int
    c_star: int
    t1: Fraction
    t2: Fraction
    profile: Profile | None  # None for the perfect instance
    rate: Fraction  # per-level growth of h1 below an off-path branch
    u: tuple[int, ...]  # h1 on the optimal path, index = depth
    branch_h1: tuple[tuple[int, ...], ...]  # h1 at ("off", k, sib, 1), [k][sib - 1]
    perfect: bool = False
    seed: int = 0

    # -------------------------------------------------------------- values

    def hstar(self, node: Node) -> int:
        if node[0] == "path":
            return self.c_star - node[1]
        _, k, _, j = node
        return j + self.c_star - k

    def h1(self, node: Node) -> Num:
        if self.perfect:
            return self.hstar(node)
        if node[0] == "path":
            return self.u[node[1]]
        _, k, sib, j = node
        return self.branch_h1[k][sib - 1] + self.rate * (j - 1)

    def h2(self, node: Node) -> Num:
        if self.perfect or node[0] == "path":
            return self.hstar(node)
        _, k, _, j = node
        return self.c_star - k - 1 + (j - 1)

    def g(self, node: Node) -> int:
        return node[1] if node[0] == "path" else node[1] + node[3]

    def f1(self, node: Node) -> Num:
        return self.g(node) + self.h1(node)

    def f2(self, node: Node) -> Num:
        return self.g(node) + self.h2(node)

    def t(self, choice: int) -> Fraction:
        return self.t1 if choice == H1 else self.t2

    # ------------------------------------------------------------ structure

    def branches(self) -> Iterator[tuple[int, int]]:
        for k in range(self.c_star):
            for sib in range(1, self.b):
                yield k, sib

    def frontier(self) -> list[tuple[int, int]]:
        """Branch roots where h1 would let A* in but h2 keeps it out."""
        out = []
        for k, sib in self.branches():
            node = ("off", k, sib, 1)
            if self.f1(node) < self.c_star <= self.f2(node):
                out.append((k, sib))
        return out

    def delta(self, node: Node) -> Num:
        return self.h2(node) - self.h1(node)

    def l_s(self, node: Node) -> int:
        """Levels below ``node`` until the h1 contour reaches c*, by walking down."""
        k_off = node[0] == "off"
        level = 0
        n = node
        while self.f1(n) < self.c_star:
            level += 1
            if not k_off:
                raise ModelError("l_s is only defined below an off-path branch")
            n = ("off", n[1], n[2], n[3] + 1)
        return level

    def l_s_closed(self, node: Node) -> int:
        """Closed form for a frontier root: ceil(delta / (1 + rate))."""
        d = Fraction(self.delta(node)) / (1 + self.rate)
        return math.ceil(d)

    def params(self) -> dict:
        return {
            "b": self.b,
            "c_star": self.c_star,
            "profile": self.profile.value if self.profile else "PERFECT",
            "rate": str(self.rate),
            "t1": str(self.t1),
            "t2": str(self.t2),
            "seed": self.seed,
        }


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**6)


def _check_size(b: int, c_star: int) -> None:
    if b < 2:
        raise ModelError("branching factor must be >= 2")
    if not 1 <= c_star <= MAX_C_STAR:
        raise ModelError(f"c_star must be in [1, {MAX_C_STAR}]")


def gen_model_tree(b: int, c_star: int, profile: Profile | str, seed: int = 0,
                   t1=1, t2=Fraction(9, 2), rate: Fraction | None = None) -> ModelInstance:
    """Random model-conforming instance; both heuristics consistent and h1 <= h2 <= h*."""
    _check_size(b, c_star)
    profile = Profile(profile)
    rng = np.random.default_rng([seed, b, c_star])
    if profile is Profile.CONSTANT_H1:
        r = Fraction(0)
    elif profile is Profile.CONSTANT_ABS_ERR:
        r = Fraction(1)
    else:
        r = Fraction(rate) if rate is not None else ADDITIVE_RATES[int(rng.integers(len(ADDITIVE_RATES)))]
        if not 0 < r < 1:
            raise ModelError("ADDITIVE_C needs a rate strictly between 0 and 1")
    # on-path h1, built from the goal upwards: consistent and bounded by h*
    u = [0] * (c_star + 1)
    for k in range(c_star - 1, -1, -1):
        lo = max(0, u[k + 1] - 1)
        hi = min(c_star - k, u[k + 1] + 1)
        u[k] = int(rng.integers(lo, hi + 1))
    branch = []
    for k in range(c_star):
        top = c_star - k - 1  # h2 at the branch root
        lo = max(0, u[k] - 1)  # consistency along the edge into the branch
        row = []
        for _ in range(1, b):
            row.append(min(max(u[k] + int(rng.integers(-1, 2)), lo), top))
        branch.append(tuple(row))
    inst = ModelInstance(b, c_star, _as_fraction(t1), _as_fraction(t2), profile, r,
                         tuple(u), tuple(branch), seed=seed)
    _validate(inst)
    return inst


def perfect_instance(b: int, c_star: int, t1=1, t2=Fraction(9, 2)) -> ModelInstance:
    _check_size(b, c_star)
    return ModelInstance(b, c_star, _as_fraction(t1), _as_fraction(t2), None, Fraction(1),
                         tuple(c_star - k for k in range(c_star + 1)),
                         tuple(tuple(c_star - k + 1 for _ in range(1, b)) for k in range(c_star)),
                         perfect=True)


def _validate(inst: ModelInstance) -> None:
    if len(inst.frontier()) > MAX_FRONTIER:
        raise ModelError(f"frontier of {len(inst.frontier())} nodes exceeds {MAX_FRONTIER}")
    c = inst.c_star
    front = set(inst.frontier())
    for d in range(c + 1):
        node = ("path", d)
        if not inst.h1(node) <= inst.h2(node) <= inst.hstar(node):
            raise ModelError(f"value order broken at {node}")
        if d < c and inst.h1(node) > 1 + inst.h1(("path", d + 1)):
            raise ModelError(f"h1 inconsistent at {node}")
    for k, sib in inst.branches():
        root = ("off", k, sib, 1)
        for j in (1, 2):
            n = ("off", k, sib, j)
            if not inst.h1(n) <= inst.h2(n) <= inst.hstar(n):
                raise ModelError(f"value order broken at {n}")
        parent = ("path", k)
        for h in (inst.h1, inst.h2):
            if h(parent) > 1 + h(root):
                raise ModelError(f"inconsistent edge into {root}")
        if (k, sib) in front:
            if inst.l_s(root) != inst.l_s_closed(root):
                raise ModelError(f"l_s walk-down disagrees with closed form at {root}")


# ------------------------------------------------------------------ strategies


def b_pow_exceeds(b: int, l: int, t1: Fraction, t2: Fraction) -> bool:
    """Exact test of b**l * t1 > t2, i.e. l > log_b(t2 / t1)."""
    return b ** l * t1 > t2


def dr_opt_decide(node: Node, inst: ModelInstance) -> int:
    """The optimal per-node rule; nodes on the optimal path take h1 since they are expanded anyway."""
    if node[0] == "path":
        return H1
    f1, f2 = inst.f1(node), inst.f2(node)
    if max(f1, f2) < inst.c_star:
        return H1
    if f1 >= inst.c_star:
        return H1
    return H2 if b_pow_exceeds(inst.b, inst.l_s(node), inst.t1, inst.t2) else H1


Strategy = Union[Rule, str, dict, Callable[[Node, ModelInstance], int]]


def _chooser(strategy: Strategy) -> Callable[[Node, ModelInstance], int]:
    if isinstance(strategy, dict):
        assignment = strategy

        def pick(node, inst):
            if node[0] == "off" and node[3] == 1:
                return assignment.get((node[1], node[2]), H1)
            return H1

        return pick
    if callable(strategy) and not isinstance(strategy, (str, Rule)):
        return strategy
    rule = Rule(strategy)
    if rule is Rule.DR_OPT:
        return dr_opt_decide
    const = H1 if rule is Rule.ALWAYS_H1 else H2
    return lambda node, inst: const


CHARGES = ("contour", "generated")


def _branch_cost(inst: ModelInstance, k: int, sib: int, pick, charge: str) -> tuple[int, Fraction]:
    expanded = 0
    time = Fraction(0)
    j = 1
    while True:
        node = ("off", k, sib, j)
        n = inst.b ** (j - 1)
        choice = pick(node, inst)
        f = inst.f1(node) if choice == H1 else inst.f2(node)
        if charge == "generated":
            time += n * inst.t(choice)
        if f < inst.c_star:
            expanded += n
            j += 1
            continue
        if charge == "contour":
            time += n * inst.t(choice)
        return expanded, time


def simulate_strategy(inst: ModelInstance, strategy: Strategy, charge: str = "contour") -> tuple[int, Fraction]:
    """A* on the tree with perfect tie-breaking: (expanded nodes, evaluation time).

    ``contour`` charges each node that is generated but not expanded with its
    chosen heuristic's time; a subtree entered below a branch therefore costs
    b**l evaluations at its contour. ``generated`` charges every generated node.
    The goal is generated but not counted as expanded.
    """
    if charge not in CHARGES:
        raise ValueError(f"charge must be one of {CHARGES}")
    pick = _chooser(strategy)
    expanded = inst.c_star
    time = Fraction(0)
    for d in range(inst.c_star + 1):
        node = ("path", d)
        if charge == "generated" or d == inst.c_star:
            time += inst.t(pick(node, inst))
    for k, sib in inst.branches():
        e, t = _branch_cost(inst, k, sib, pick, charge)
        expanded += e
        time += t
    return expanded, time


def enumerate_optimal(inst: ModelInstance, charge: str = "contour") -> tuple[Fraction, dict]:
    """Brute-force minimum evaluation time over every h1/h2 assignment to the frontier.

    Off the frontier the cheap heuristic is forced, and below a branch root that
    chose h1 every descendant keeps h1. Returns (minimum time, a minimising assignment).
    """
    front = inst.frontier()
    if len(front) > MAX_FRONTIER:
        raise ModelError(f"frontier of {len(front)} nodes exceeds {MAX_FRONTIER}")
    base = simulate_strategy(inst, {}, charge)[1]
    # additional cost of switching each frontier root to h2
    extra = []
    for k, sib in front:
        c1 = _branch_cost(inst, k, sib, _chooser({(k, sib): H1}), charge)[1]
        c2 = _branch_cost(inst, k, sib, _chooser({(k, sib): H2}), charge)[1]
        extra.append(c2 - c1)
    if not front:
        return base, {}
    denom = math.lcm(*(x.denominator for x in extra))
    ints = np.array([int(x * denom) for x in extra], dtype=np.int64)
    bits = ((np.arange(1 << len(front), dtype=np.int64)[:, None] >> np.arange(len(front))) & 1)
    totals = bits @ ints
    best = int(np.argmin(totals))  # first minimum: fewest h2 picks in binary order
    assignment = {node: int(bits[best, i]) for i, node in enumerate(front)}
    return base + Fraction(int(totals[best]), denom), assignment


# ------------------------------------------------------------- batches and CSV


RATIOS = (Fraction(2), Fraction(9, 2), Fraction(20))


def random_instances(n: int, seed: int = 0) -> Iterator[ModelInstance]:
    """``n`` instances cycling through b in {2, 3}, all profiles and the three cost ratios."""
    rng = np.random.default_rng(seed)
    profiles = list(Profile)
    made = 0
    attempt = 0
    while made < n:
        b = 2 + made % 2
        c_max = 10 if b == 2 else 8
        c_star = int(rng.integers(3, c_max + 1))
        profile = profiles[made % len(profiles)]
        ratio = RATIOS[(made // 2) % len(RATIOS)]
        attempt += 1
        try:
            inst = gen_model_tree(b, c_star, profile, seed=seed * 100_003 + attempt, t1=1, t2=ratio)
        except ModelError:
            continue
        made += 1
        yield inst


CSV_FIELDS = ("b", "c_star", "profile", "rate", "t1", "t2", "seed", "charge", "strategy",
              "expanded", "eval_time", "frontier")


def model_rows(instances: Iterable[ModelInstance], charge: str = "contour") -> Iterator[dict]:
    for inst in instances:
        base = inst.params()
        front = len(inst.frontier())
        for rule in Rule:
            e, t = simulate_strategy(inst, rule, charge)
            yield {**base, "charge": charge, "strategy": rule.value, "expanded": e,
                   "eval_time": str(t), "frontier": front}
        best, _ = enumerate_optimal(inst, charge)
        yield {**base, "charge": charge, "strategy": "OPTIMAL", "expanded": "",
               "eval_time": str(best), "frontier": front}


def to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def all_assignments(front: list[tuple[int, int]]) -> Iterator[dict]:
    for bits in itertools.product((H1, H2), repeat=len(front)):
        yield dict(zip(front, bits))
