from __future__ import annotations

import math

import numpy as np
import oracles
import pytest
from conftest import SMALL3
from hypothesis import given, settings
from hypothesis import strategies as st

from selmax import _kernels as K
from selmax.domains import chain_lock, gen_domain, gripper
from selmax.heuristics import (
    DEAD_END,
    PDB,
    Blind,
    HMax,
    LMCut,
    PatternTooLargeError,
    hmax_reference,
    make_heuristic,
    parse_ensemble,
    pdb_build,
    pdb_lookup,
    relaxed_plan_length,
)
from selmax.task import Action, Task, Variable, parse_task


def small_tasks():
    yield parse_task(SMALL3, name="small3")
    yield gripper(1)
    yield gripper(2)
    for size in (1, 2, 3, 5, 8):
        yield gen_domain("chain-branch", size, seed=1)
    for size in (1, 2, 5):
        yield gen_domain("transport-lite", size, seed=2)
    yield chain_lock(0)


SMALL = list(small_tasks())
IDS = [t.name for t in SMALL]


def test_blind_definition():
    t = Task((Variable("v", ("a", "b", "c")),),
             (Action("x", ((0, 0),), ((0, 1),), 5.0), Action("y", ((0, 1),), ((0, 2),), 2.0)),
             (0,), ((0, 2),))
    h = Blind(t)
    assert h((2,)) == 0
    assert h((0,)) == 2
    assert Blind(gripper(1))(gripper(1).init) == 1


def test_hmax_chain(chain_task):
    assert HMax(chain_task)((0,)) == 2
    assert HMax(chain_task)((2,)) == 0


def test_lmcut_disjoint_goals(disjoint_task):
    s = disjoint_task.init
    assert HMax(disjoint_task)(s) == 1
    assert LMCut(disjoint_task)(s) == 2
    assert LMCut(disjoint_task)((1, 1)) == 0


def test_dead_end_detection():
    t = Task((Variable("v", ("a", "b")), Variable("w", ("a", "b"))),
             (Action("x", ((0, 0),), ((0, 1),)),), (0, 0), ((1, 1),))
    for h in (HMax(t), LMCut(t), PDB(t, [1])):
        assert h(t.init) == DEAD_END
    assert relaxed_plan_length(t, t.init) == DEAD_END
    assert DEAD_END > 1e300


def test_pdb_empty_pattern(small3_task):
    p = pdb_build(small3_task, [])
    assert len(p.table) == 1 and p.table[0] == 0
    assert pdb_lookup(p, small3_task.init) == 0


def test_pdb_singleton_hand(small3_task):
    # projection onto a: a0 -(2)-> a1 -(1)-> a2, goal a2
    p = pdb_build(small3_task, [0])
    assert [pdb_lookup(p, (a, 0, 0)) for a in range(3)] == [3, 1, 0]


def test_pdb_too_large():
    t = gripper(3)
    with pytest.raises(PatternTooLargeError):
        PDB(t, range(len(t.variables)), max_size=10)


@pytest.mark.parametrize("task", SMALL, ids=IDS)
def test_full_pattern_pdb_is_hstar(task):
    hstar = oracles.hstar_value_iteration(task)
    p = make_heuristic("pdb:all", task)
    for s, h in hstar.items():
        assert p(s) == h


@pytest.mark.parametrize("task", SMALL, ids=IDS)
def test_admissible_and_goal_zero(task):
    hstar = oracles.hstar_value_iteration(task)
    hs = parse_ensemble("blind,hmax,lmcut,pdb:0", task)
    for s, h in hstar.items():
        vals = [f(s) for f in hs]
        for v in vals:
            assert v <= h + 1e-9
        if task.is_goal(s):
            assert vals == [0, 0, 0, 0]
        # lmcut never below hmax
        assert vals[2] >= vals[1] - 1e-9


@pytest.mark.parametrize("task", SMALL, ids=IDS)
def test_hmax_matches_fixpoint(task):
    h = HMax(task)
    for s in oracles.hstar_value_iteration(task):
        want = oracles.hmax_fixpoint(task, s)
        assert h(s) == want
        assert hmax_reference(task, s) == want


@pytest.mark.parametrize("task", SMALL, ids=IDS)
def test_consistency_hmax_and_pdb(task):
    hs = [HMax(task), make_heuristic("pdb:0", task)]
    for s in oracles.hstar_value_iteration(task):
        for a, t in task.successors(s):
            for h in hs:
                assert h(s) <= a.cost + h(t) + 1e-9


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("task", SMALL, ids=IDS)
def test_numba_and_numpy_agree(task):
    pairs = [(HMax(task, use_numba=True), HMax(task, use_numba=False)),
             (LMCut(task, use_numba=True), LMCut(task, use_numba=False))]
    pattern = list(range(min(2, len(task.variables))))
    p_jit, p_np = PDB(task, pattern, use_numba=True), PDB(task, pattern, use_numba=False)
    assert np.array_equal(p_jit.table, p_np.table)
    for s in oracles.hstar_value_iteration(task):
        for a, b in pairs:
            assert a(s) == b(s)


def test_relaxed_plan_length_examples(chain_task, disjoint_task):
    assert relaxed_plan_length(chain_task, (2,)) == 0
    assert relaxed_plan_length(chain_task, (0,)) == 2
    assert relaxed_plan_length(disjoint_task, (0, 0)) == 2


@pytest.mark.parametrize("task", SMALL, ids=IDS)
def test_relaxed_plan_length_positive_off_goal(task):
    for s in oracles.hstar_value_iteration(task):
        r = relaxed_plan_length(task, s)
        if task.is_goal(s):
            assert r == 0
        elif r != DEAD_END:
            assert r >= 1
            assert r == relaxed_plan_length(task, s)


def test_relaxed_plan_lowest_index_supporter():
    # two achievers of the goal at equal cost: the first one is used
    t = Task((Variable("v", ("a", "b")), Variable("w", ("a", "b"))),
             (Action("first", ((1, 1),), ((0, 1),)), Action("second", (), ((0, 1),), 2.0),
              Action("enable", (), ((1, 1),))),
             (0, 0), ((0, 1),))
    assert relaxed_plan_length(t, t.init) == 2


def test_ensemble_parsing():
    t = gripper(1)
    hs = parse_ensemble("blind, hmax,lmcut,pdb:robot+3", t)
    assert [h.name for h in hs] == ["blind", "hmax", "lmcut", "pdb:0+3"]
    with pytest.raises(ValueError):
        parse_ensemble("hmax,ff", t)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_determinism_repeated_calls(seed):
    t = gen_domain("transport-lite", 3)
    rng = np.random.default_rng(seed)
    s = t.init
    for _ in range(int(rng.integers(0, 8))):
        succ = t.successors(s)
        if not succ:
            break
        s = succ[int(rng.integers(len(succ)))][1]
    for h in parse_ensemble("blind,hmax,lmcut", t):
        v = h(s)
        assert h(s) == v and not math.isnan(v)
