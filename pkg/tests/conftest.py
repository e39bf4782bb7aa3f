from __future__ import annotations

import pytest

from selmax.task import parse_task

FLIP = """sas-lite 1
vars 1
var v0 2 off on
init 0
goal 1 0=1
ops 1
op flip cost 1 pre 1 0=0 eff 1 0=1
"""

# v0: 0 -> 1 -> 2 with unit steps
CHAIN = """sas-lite 1
vars 1
var v0 3 a b c
init 0
goal 1 0=2
ops 2
op step01 cost 1 pre 1 0=0 eff 1 0=1
op step12 cost 1 pre 1 0=1 eff 1 0=2
"""

# two goals, each needing its own unit-cost action
DISJOINT = """sas-lite 1
vars 2
var p 2 no yes
var q 2 no yes
init 0 0
goal 2 0=1 1=1
ops 2
op make-p cost 1 pre 0 eff 1 0=1
op make-q cost 1 pre 0 eff 1 1=1
"""

# three variables, mixed costs, a reversible action and a zero-cost action
SMALL3 = """sas-lite 1
vars 3
var a 3 a0 a1 a2
var b 2 b0 b1
var c 2 c0 c1
init 0 0 0
goal 2 0=2 2=1
ops 6
op a-up cost 2 pre 1 0=0 eff 1 0=1
op a-up2 cost 1 pre 2 0=1 1=1 eff 1 0=2
op a-back cost 1 pre 1 0=1 eff 1 0=0
op b-set cost 0 pre 0 eff 1 1=1
op b-reset cost 1 pre 1 1=1 eff 1 1=0
op c-set cost 3/2 pre 1 0=2 eff 2 1=0 2=1
"""


@pytest.fixture
def flip_task():
    return parse_task(FLIP, name="flip")


@pytest.fixture
def chain_task():
    return parse_task(CHAIN, name="chain")


@pytest.fixture
def disjoint_task():
    return parse_task(DISJOINT, name="disjoint")


@pytest.fixture
def small3_task():
    return parse_task(SMALL3, name="small3")
