"""Heuristic combiners: single, point-wise max, random choice and selective max."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .heuristics import DEAD_END, Heuristic, parse_ensemble
from .learning import H1, H2, Classifier, Prediction, make_classifier, parse_classifier
from .metering import CostModel, Meter, clock
from .sampling import (
    METHODS,
    Estimates,
    Sample,
    draw_sample,
    estimate_params,
    goal_depth_estimate,
)
from .task import State, Task

CHEAP, EXPENSIVE = H1, H2
COMBINERS = ("single", "max", "rand", "selmax")


@dataclass(frozen=True)
class SelMaxConfig:
    alpha: float = 1.0
    rho: float = 0.6
    N: int = 100
    sampling: str = "pdb"
    classifier: str = "nb"
    ensemble: tuple[str, ...] = ("hmax", "lmcut")

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= self.rho:
            raise ValueError("rho must be >= 0")
        if self.N < 1:
            raise ValueError("sample size N must be >= 1")
        if self.sampling not in METHODS:
            raise ValueError(f"unknown sampling method {self.sampling!r}")
        parse_classifier(self.classifier)

    @classmethod
    def ipc(cls, **kw) -> "SelMaxConfig":
        """The larger-sample, biased-probe preset used for the competition-style runs."""
        kw.setdefault("N", 1000)
        kw.setdefault("sampling", "biased")
        return cls(**kw)


@dataclass(frozen=True)
class PairThreshold:
    cheap: int  # ensemble index
    expensive: int
    tau: float


def orient_pair(i: int, j: int, est: Estimates) -> tuple[int, int]:
    """Order a pair so the first member is no slower; equal times keep the given order."""
    return (j, i) if est.t[i] > est.t[j] else (i, j)


def compute_threshold(alpha: float, est: Estimates, pair: tuple[int, int]) -> float:
    cheap, exp = pair
    ratio = est.t[exp] / est.t[cheap]
    if alpha == 0 or ratio <= 1.0:
        return 0.0
    return alpha * est.c_hat * math.log(ratio) / math.log(est.b)


def label_state(h_cheap: float, h_exp: float, tau: float) -> int:
    cheap_dead = h_cheap == DEAD_END
    exp_dead = h_exp == DEAD_END
    if cheap_dead:
        return CHEAP
    if exp_dead:
        return EXPENSIVE
    return EXPENSIVE if h_exp - h_cheap > tau else CHEAP


# ------------------------------------------------------------------ evaluators


class Evaluator:
    """A heuristic function over states that owns a meter for its search."""

    name = "evaluator"
    setup: "Setup | None" = None

    def __init__(self, heuristics: Sequence[Heuristic], meter: Meter | None = None):
        self.heuristics = list(heuristics)
        self.meter = meter or Meter()
        self.setup_time = 0.0

    def _h(self, i: int, s: State) -> float:
        return self.meter.timed_call(self.heuristics[i], s)[0]

    def __call__(self, s: State) -> float:
        raise NotImplementedError


class Single(Evaluator):
    def __init__(self, heuristics, index: int = 0, meter: Meter | None = None):
        super().__init__(heuristics, meter)
        if not 0 <= index < len(self.heuristics):
            raise ValueError(f"heuristic index {index} out of range")
        self.index = index
        self.name = f"single:{self.heuristics[index].name}"

    def __call__(self, s: State) -> float:
        return self._h(self.index, s)


class Max(Evaluator):
    name = "max"

    def __call__(self, s: State) -> float:
        return max(self._h(i, s) for i in range(len(self.heuristics)))


class Random(Evaluator):
    """One uniformly drawn heuristic per distinct state, remembered if the state comes back."""

    name = "rand"

    def __init__(self, heuristics, seed: int = 0, meter: Meter | None = None):
        super().__init__(heuristics, meter)
        self.rng = np.random.default_rng(seed)
        self.choice: dict[State, int] = {}

    def __call__(self, s: State) -> float:
        i = self.choice.get(s)
        if i is None:
            i = self.choice[s] = int(self.rng.integers(len(self.heuristics)))
        return self._h(i, s)


@dataclass
class _Pair:
    threshold: PairThreshold
    classifier: Classifier


@dataclass
class Setup:
    """What the pre-search phase produced; kept for inspection and tests."""

    sample: Sample | None = None
    estimates: Estimates | None = None
    thresholds: list[PairThreshold] = field(default_factory=list)
    labels: list[list[int]] = field(default_factory=list)  # per pair, per sample state
    unsolvable: bool = False


class SelectiveMax(Evaluator):
    """Pick, per state, the heuristic a classifier expects to pay off.

    With two heuristics this is the single-classifier rule: confident
    predictions compute one heuristic; otherwise both are computed, the max is
    returned and the classifier learns the state's label. With more, pairwise
    classifiers vote with their confidences.
    """

    name = "selmax"

    def __init__(self, heuristics, pairs: list[_Pair], est: Estimates, rho: float,
                 meter: Meter, record_trace: bool = False):
        super().__init__(heuristics, meter)
        self.pairs = pairs
        self.est = est
        self.rho = rho
        self.evaluations = 0
        self.low_confidence = 0
        self.pair_updates = 0
        self.trace: list[int] | None = [] if record_trace else None
        n = len(self.heuristics)
        # tie order for the vote: cheaper first, then ensemble order
        self._rank = sorted(range(n), key=lambda i: (est.t[i], i))

    @property
    def thresholds(self) -> list[PairThreshold]:
        return [p.threshold for p in self.pairs]

    def _classify(self, clf: Classifier, s: State) -> Prediction:
        m = self.meter
        t0 = clock()
        pred = clf.classify(s)
        m.classify_time += m.overhead_cost("classify", clock() - t0)
        m.classify_calls += 1
        return pred

    def _update(self, clf: Classifier, s: State, y: int) -> None:
        m = self.meter
        t0 = clock()
        clf.update(s, y)
        m.update_time += m.overhead_cost("update", clock() - t0)

    def __call__(self, s: State) -> float:
        self.evaluations += 1
        preds = [self._classify(p.classifier, s) for p in self.pairs]
        totals = [0.0] * len(self.heuristics)
        for p, pred in zip(self.pairs, preds):
            th = p.threshold
            totals[th.expensive if pred.label == EXPENSIVE else th.cheap] += pred.confidence
        best = max(totals)
        winner = next(i for i in self._rank if totals[i] == best)
        weak = [k for k, pred in enumerate(preds) if not pred.confidence > self.rho]
        values: dict[int, float] = {winner: self._h(winner, s)}
        if weak:
            self.low_confidence += 1
            self.meter.updates += 1
            for k in weak:
                th = self.pairs[k].threshold
                for i in (th.cheap, th.expensive):
                    if i not in values:
                        values[i] = self._h(i, s)
                if len(self.heuristics) == 2:
                    self.meter.both_evaluations += 1
                self._update(self.pairs[k].classifier, s,
                             label_state(values[th.cheap], values[th.expensive], th.tau))
                self.pair_updates += 1
        if self.trace is not None:
            self.trace.append(sum(1 << i for i in values))
        return max(values.values())


# ---------------------------------------------------------------- construction


def build_selmax_evaluator(task: Task, config: SelMaxConfig, seed: int = 0,
                           heuristics: Sequence[Heuristic] | None = None,
                           cost_model: CostModel | None = None,
                           record_trace: bool = False) -> Evaluator:
    """Sample, estimate, threshold, label and train; return the ready evaluator.

    Sampling and labeling are booked on the returned evaluator's meter. A task
    whose initial state is a recognised dead end gets a plain max evaluator.
    """
    if config.N < 1:
        raise ValueError("sample size N must be >= 1")
    t_start = clock()
    hs = list(heuristics) if heuristics is not None else parse_ensemble(",".join(config.ensemble), task)
    meter = Meter(cost_model=cost_model)
    if len(hs) < 2:
        ev: Evaluator = Single(hs, 0, meter)
        ev.setup = Setup()
        return ev

    t_sample = clock()
    h_before = meter.heuristic_time

    def max_h(s: State) -> float:
        return max(meter.timed_call(h, s, sampling=True)[0] for h in hs)

    d_hat, dead = goal_depth_estimate(task, max_h)
    if dead:
        ev = Max(hs, meter)
        ev.setup = Setup(unsolvable=True)
        meter.sampling_time = (meter.heuristic_time - h_before) if meter.abstract else clock() - t_sample
        ev.setup_time = clock() - t_start
        return ev
    sample = draw_sample(config.sampling, task, hs, config.N, d_hat, seed, meter)
    est = estimate_params(sample, names=[h.name for h in hs])
    meter.sampling_time = (meter.heuristic_time - h_before) if meter.abstract else clock() - t_sample

    t_label = clock()
    setup = Setup(sample, est)
    pairs = []
    values = np.asarray(sample.values, dtype=np.float64)
    for i, j in itertools.combinations(range(len(hs)), 2):
        cheap, exp = orient_pair(i, j, est)
        th = PairThreshold(cheap, exp, compute_threshold(config.alpha, est, (cheap, exp)))
        labels = [label_state(v[cheap], v[exp], th.tau) for v in values]
        clf = make_classifier(config.classifier, task.domain_sizes)
        clf.fit(sample.states, labels)
        pairs.append(_Pair(th, clf))
        setup.thresholds.append(th)
        setup.labels.append(labels)
    wall = clock() - t_label
    if meter.abstract:
        meter.labeling_time = meter.cost_model.overhead("update") * len(sample) * len(pairs)
    else:
        meter.labeling_time = wall
    ev = SelectiveMax(hs, pairs, est, config.rho, meter, record_trace)
    ev.setup = setup
    ev.setup_time = clock() - t_start
    return ev


@dataclass(frozen=True)
class Combine:
    kind: str
    index: int = 0

    @classmethod
    def parse(cls, spec: str) -> "Combine":
        kind, _, arg = spec.strip().partition(":")
        if kind not in COMBINERS:
            raise ValueError(f"unknown combiner {spec!r}; expected single:<i>, max, rand or selmax")
        if kind == "single":
            return cls(kind, int(arg) if arg else 0)
        if arg:
            raise ValueError(f"combiner {kind!r} takes no argument")
        return cls(kind)

    def __str__(self):
        return f"single:{self.index}" if self.kind == "single" else self.kind


def make_evaluator(task: Task, combine: str | Combine, config: SelMaxConfig | None = None,
                   seed: int = 0, cost_model: CostModel | None = None,
                   record_trace: bool = False) -> Evaluator:
    config = config or SelMaxConfig()
    c = Combine.parse(combine) if isinstance(combine, str) else combine
    if c.kind == "selmax":
        return build_selmax_evaluator(task, config, seed, cost_model=cost_model, record_trace=record_trace)
    t0 = clock()
    hs = parse_ensemble(",".join(config.ensemble), task)
    meter = Meter(cost_model=cost_model)
    if c.kind == "single":
        ev: Evaluator = Single(hs, c.index, meter)
    elif c.kind == "max":
        ev = Max(hs, meter)
    else:
        ev = Random(hs, seed, meter)
    ev.setup_time = clock() - t0
    return ev


def with_overrides(config: SelMaxConfig, **kw) -> SelMaxConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
