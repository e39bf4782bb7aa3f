"""Selective max: learn, per state, which admissible heuristic is worth computing."""

from __future__ import annotations

from .heuristics import (
    DEAD_END,
    PDB,
    Blind,
    HMax,
    LMCut,
    make_heuristic,
    parse_ensemble,
)
from .search import Limits, SearchResult, Status, astar
from .selective import SelMaxConfig, build_selmax_evaluator, make_evaluator
from .task import Action, Task, Variable, parse_task, render_task

__all__ = [
    "Action", "Blind", "DEAD_END", "HMax", "LMCut", "Limits", "PDB", "SearchResult", "SelMaxConfig",
    "Status", "Task", "Variable", "astar", "build_selmax_evaluator", "make_evaluator", "make_heuristic",
    "parse_ensemble", "parse_task", "render_task",
]

__version__ = "0.1.0"
