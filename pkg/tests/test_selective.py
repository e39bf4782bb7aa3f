from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selmax import _kernels as K
from selmax import learning
from selmax.domains import gen_domain, gripper
from selmax.heuristics import DEAD_END, Heuristic, parse_ensemble
from selmax.learning import Classifier, Prediction
from selmax.metering import CostModel, Meter
from selmax.sampling import Estimates
from selmax.search import astar, dijkstra_oracle
from selmax.selective import (
    CHEAP,
    EXPENSIVE,
    Combine,
    Max,
    PairThreshold,
    Random,
    SelectiveMax,
    SelMaxConfig,
    Single,
    _Pair,
    build_selmax_evaluator,
    compute_threshold,
    label_state,
    make_evaluator,
    orient_pair,
)
from selmax.task import Action, Task, Variable

COSTS = CostModel({"hmax": 1.0, "lmcut": 4.5})


def est(t, b=2.0, c_hat=1.0):
    return Estimates(b, tuple(t), c_hat, 4)


class Fixed(Classifier):
    def __init__(self, label, confidence):
        self.pred = Prediction(label, confidence)
        self.seen = []

    def classify(self, x):
        return self.pred

    def update(self, x, y):
        self.seen.append((x, y))


class Const(Heuristic):
    def __init__(self, name, value):
        self.name = name
        self.value = value

    def __call__(self, s):
        return self.value


def test_orient_pair():
    assert orient_pair(0, 1, est([1.0, 4.5])) == (0, 1)
    assert orient_pair(0, 1, est([4.5, 1.0])) == (1, 0)
    assert orient_pair(0, 1, est([2.0, 2.0])) == (0, 1)


def test_threshold_formula():
    tau = compute_threshold(1.0, est([1.0, 4.5]), (0, 1))
    assert tau == pytest.approx(math.log2(4.5), abs=1e-12)
    assert round(tau, 4) == 2.1699
    assert compute_threshold(1.0, est([2.0, 2.0]), (0, 1)) == 0
    assert compute_threshold(0.0, est([1.0, 100.0], b=1.5, c_hat=7), (0, 1)) == 0
    # average action cost scales the threshold
    assert compute_threshold(2.0, est([1.0, 8.0], c_hat=3.0), (0, 1)) == pytest.approx(18.0)


def test_label_state():
    assert label_state(5, 9, 2.17) == EXPENSIVE
    assert label_state(5, 5, 0.0) == CHEAP
    assert label_state(5, 7, 2.17) == CHEAP
    assert label_state(DEAD_END, 3, 1.0) == CHEAP
    assert label_state(3, DEAD_END, 1.0) == EXPENSIVE
    assert label_state(DEAD_END, DEAD_END, 1.0) == CHEAP


def test_defaults():
    c = SelMaxConfig()
    assert (c.alpha, c.rho, c.N, c.sampling, c.classifier) == (1.0, 0.6, 100, "pdb", "nb")
    ipc = SelMaxConfig.ipc()
    assert (ipc.N, ipc.sampling) == (1000, "biased")
    with pytest.raises(ValueError):
        SelMaxConfig(N=0)
    with pytest.raises(ValueError):
        SelMaxConfig(alpha=-1)
    with pytest.raises(ValueError):
        SelMaxConfig(sampling="first-n")


def selmax_with(heuristics, preds, t, rho=0.5):
    pairs = []
    for (i, j), (label, conf) in preds.items():
        pairs.append(_Pair(PairThreshold(i, j, 0.0), Fixed(label, conf)))
    return SelectiveMax(heuristics, pairs, est(t), rho, Meter(), record_trace=True)


def test_vote_hand_tally():
    hs = [Const("a", 1.0), Const("b", 2.0), Const("c", 3.0)]
    ev = selmax_with(hs, {(0, 1): (CHEAP, 0.9), (0, 2): (CHEAP, 0.8), (1, 2): (CHEAP, 0.7)}, [1, 2, 3])
    assert ev((0,)) == 1.0
    assert ev.trace == [0b001]
    assert ev.meter.calls == {"a": 1}


def test_vote_tie_goes_to_cheapest():
    hs = [Const("a", 1.0), Const("b", 2.0), Const("c", 3.0)]
    # a beats b, b beats c, c beats a, all with the same confidence
    preds = {(0, 1): (CHEAP, 0.8), (1, 2): (CHEAP, 0.8), (0, 2): (EXPENSIVE, 0.8)}
    ev = selmax_with(hs, preds, [3, 1, 2])
    assert ev((0,)) == 2.0
    ev = selmax_with(hs, preds, [2, 2, 2])
    assert ev((0,)) == 1.0  # equal times: ensemble order


def test_two_heuristic_vote_is_single_decision():
    hs = [Const("a", 1.0), Const("b", 5.0)]
    assert selmax_with(hs, {(0, 1): (EXPENSIVE, 0.7)}, [1, 4])((0,)) == 5.0
    assert selmax_with(hs, {(0, 1): (CHEAP, 0.7)}, [1, 4])((0,)) == 1.0


def test_low_confidence_pair_only():
    hs = [Const("a", 1.0), Const("b", 2.0), Const("c", 7.0)]
    preds = {(0, 1): (CHEAP, 0.9), (0, 2): (CHEAP, 0.9), (1, 2): (CHEAP, 0.55)}
    ev = selmax_with(hs, preds, [1, 2, 3], rho=0.6)
    assert ev((0,)) == 7.0  # max over a (winner), b and c (weak pair)
    assert ev.trace == [0b111]
    weak = ev.pairs[2].classifier
    assert weak.seen == [((0,), EXPENSIVE)]
    assert ev.pairs[0].classifier.seen == [] and ev.pairs[1].classifier.seen == []
    assert ev.meter.updates == ev.low_confidence == 1


def test_cold_start_takes_max_branch():
    t = gripper(1)
    hs = parse_ensemble("hmax,lmcut", t)
    clf = learning.NaiveBayes(t.domain_sizes)
    ev = SelectiveMax(hs, [_Pair(PairThreshold(0, 1, 0.0), clf)], est([1, 4.5]), 0.6, Meter())
    v = ev(t.init)
    assert v == max(h(t.init) for h in hs)
    assert ev.low_confidence == 1 and clf.n_examples == 1


def build(task, seed=0, **kw):
    return build_selmax_evaluator(task, SelMaxConfig(**kw), seed=seed, cost_model=COSTS, record_trace=True)


SUITE = [gripper(1), gripper(2), gen_domain("chain-branch", 4, seed=2), gen_domain("chain-branch", 8, seed=5),
         gen_domain("transport-lite", 2, seed=1), gen_domain("transport-lite", 6, seed=3)]


@pytest.mark.parametrize("task", SUITE, ids=[t.name for t in SUITE])
def test_rho_below_half_never_learns(task):
    ev = build(task, rho=0.49)
    n0 = ev.pairs[0].classifier.n_examples
    astar(task, ev)
    assert ev.low_confidence == 0 and ev.meter.both_evaluations == 0
    assert all(m.bit_count() == 1 for m in ev.trace)
    assert ev.pairs[0].classifier.n_examples == n0


@pytest.mark.parametrize("task", SUITE, ids=[t.name for t in SUITE])
def test_rho_one_is_max(task):
    ev = build(task, rho=1.0)
    r = astar(task, ev)
    m = astar(task, Max(parse_ensemble("hmax,lmcut", task)))
    assert r.stats.expanded == m.stats.expanded
    assert r.plan == m.plan
    assert all(x == 0b11 for x in ev.trace)


@pytest.mark.parametrize("task", SUITE, ids=[t.name for t in SUITE])
def test_alpha_zero_labels(task):
    ev = build(task, alpha=0.0)
    labels = ev.setup.labels[0]
    vals = ev.setup.sample.values
    th = ev.thresholds[0]
    assert th.tau == 0
    for (a, b), y in zip(vals, labels):
        hc, he = (a, b) if th.cheap == 0 else (b, a)
        if hc != DEAD_END and he != DEAD_END:
            assert y == int(he - hc > 0)


@pytest.mark.parametrize("task", SUITE, ids=[t.name for t in SUITE])
def test_alpha_monotone(task):
    ev = build(task)
    smp, e = ev.setup.sample, ev.setup.estimates
    counts = []
    for alpha in (0.0, 0.5, 1.0, 2.0, 5.0, 50.0):
        tau = compute_threshold(alpha, e, (ev.thresholds[0].cheap, ev.thresholds[0].expensive))
        th = ev.thresholds[0]
        counts.append(sum(label_state(v[th.cheap], v[th.expensive], tau) for v in smp.values))
    assert counts == sorted(counts, reverse=True)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(SUITE))), st.sampled_from([0.0, 1.0, 5.0]),
       st.sampled_from([0.49, 0.6, 0.8, 0.99]), st.integers(0, 1000),
       st.sampled_from(["pdb", "biased", "unbiased"]), st.sampled_from(["nb", "knn:3"]))
def test_admissible_bounded_and_accounted(k, alpha, rho, seed, sampling, clf):
    task = SUITE[k]
    ev = build_selmax_evaluator(task, SelMaxConfig(alpha, rho, 20, sampling, clf), seed=seed,
                                cost_model=COSTS, record_trace=True)
    hs = ev.heuristics
    hstar = dijkstra_oracle(task).hstar
    taus = list(ev.thresholds)
    n0 = [p.classifier.n_examples if hasattr(p.classifier, "n_examples") else p.classifier.n for p in ev.pairs]
    for i, s in enumerate(list(hstar)[:200]):
        v = ev(s)
        both = max(h(s) for h in hs)
        assert v <= hstar[s] + 1e-9
        assert v <= both
        if ev.trace[-1] == 0b11:
            assert v == both
    assert ev.thresholds == taus
    n1 = [p.classifier.n_examples if hasattr(p.classifier, "n_examples") else p.classifier.n for p in ev.pairs]
    assert n1[0] - n0[0] == ev.meter.updates == ev.low_confidence


def test_golden_trace_reproducible(monkeypatch):
    task = gen_domain("transport-lite", 6, seed=3)

    def run():
        ev = build(task, seed=4)
        r = astar(task, ev)
        return ev.trace, r.stats.expanded, ev.thresholds

    first = run()
    assert first == run()
    assert 0b01 in first[0] and 0b11 in first[0]
    if K.HAVE_NUMBA:
        monkeypatch.setattr(K, "USE_NUMBA", False)
        assert run() == first


def test_dead_initial_state_gives_max():
    t = Task((Variable("v", ("a", "b")), Variable("w", ("a", "b"))),
             (Action("x", ((0, 0),), ((0, 1),)),), (0, 0), ((1, 1),))
    ev = build(t)
    assert isinstance(ev, Max) and ev.setup.unsolvable


def test_single_heuristic_ensemble():
    ev = build(gripper(1), ensemble=("hmax",))
    assert isinstance(ev, Single)


def test_overhead_is_metered_abstract():
    task = gen_domain("transport-lite", 6, seed=3)
    costs = CostModel({"hmax": 1.0, "lmcut": 4.5, "classify": 0.1, "update": 0.2})
    ev = build_selmax_evaluator(task, SelMaxConfig(N=30), cost_model=costs)
    sampled = ev.meter.heuristic_time
    assert ev.meter.sampling_time == pytest.approx(sampled)
    assert ev.meter.labeling_time == pytest.approx(0.2 * len(ev.setup.sample))
    r = astar(task, ev)
    r.stats.absorb(ev.meter, ev.setup_time)
    m = ev.meter
    assert m.classify_time == pytest.approx(0.1 * ev.evaluations)
    assert m.update_time == pytest.approx(0.2 * ev.pair_updates)
    assert 0 < r.stats.overhead_fraction < 1
    want = (m.sampling_time + m.labeling_time + m.classify_time + m.update_time) / r.stats.total_time
    assert r.stats.overhead_fraction == pytest.approx(want)


def test_random_is_memoised_per_state():
    t = gripper(2)
    hs = [Const("a", 1.0), Const("b", 2.0)]
    ev = Random(hs, seed=3)
    first = [ev(s) for s in [(0, 0, 0, 0, 0), (1, 0, 0, 0, 0)] * 5]
    assert first[:2] * 5 == first
    r1 = astar(t, make_evaluator(t, "rand", seed=1))
    r2 = astar(t, make_evaluator(t, "rand", seed=1))
    assert r1.stats.expanded == r2.stats.expanded


def test_combine_parse():
    assert Combine.parse("single:2") == Combine("single", 2)
    assert str(Combine.parse("max")) == "max"
    for bad in ("avg", "max:1"):
        with pytest.raises(ValueError):
            Combine.parse(bad)
