"""Per-search accounting of heuristic calls, learning overhead and injected cost models."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

COST_MODEL_ENV = "SELMAX_COST_MODEL"

clock = time.perf_counter


@dataclass(frozen=True)
class CostModel:
    """Deterministic per-call costs in abstract time units.

    Keys are heuristic names (``pdb:...`` falls back to ``pdb``) plus the
    optional overhead keys ``classify`` and ``update``. Unknown heuristics
    cost ``default``.
    """

    costs: dict[str, float]
    default: float = 1.0

    def heuristic(self, name: str) -> float:
        if name in self.costs:
            return float(self.costs[name])
        base = name.split(":", 1)[0]
        return float(self.costs.get(base, self.default))

    def overhead(self, key: str) -> float:
        return float(self.costs.get(key, 0.0))

    @classmethod
    def load(cls, path: str | Path) -> "CostModel":
        data = json.loads(Path(path).read_text())
        default = float(data.pop("default", 1.0))
        return cls({k: float(v) for k, v in data.items()}, default)

    @classmethod
    def from_env(cls) -> "CostModel | None":
        path = os.environ.get(COST_MODEL_ENV)
        return cls.load(path) if path else None

    def to_dict(self) -> dict:
        return {**self.costs, "default": self.default}


@dataclass
class Meter:
    """Counters one evaluator writes while it serves a single search.

    With a cost model, every time field is in abstract units and the totals are
    fully deterministic; otherwise they are wall-clock seconds.
    """

    cost_model: CostModel | None = None
    calls: dict[str, int] = field(default_factory=dict)
    times: dict[str, float] = field(default_factory=dict)
    sampling_calls: dict[str, int] = field(default_factory=dict)
    sampling_time: float = 0.0
    labeling_time: float = 0.0
    classify_time: float = 0.0
    update_time: float = 0.0
    classify_calls: int = 0
    updates: int = 0
    both_evaluations: int = 0

    @property
    def abstract(self) -> bool:
        return self.cost_model is not None

    def timed_call(self, h, s, sampling: bool = False) -> tuple[float, float]:
        """Evaluate ``h`` on ``s``; return (value, charged time)."""
        if self.cost_model is None:
            t0 = clock()
            v = h(s)
            dt = clock() - t0
        else:
            v = h(s)
            dt = self.cost_model.heuristic(h.name)
        self.record(h.name, dt, sampling)
        return v, dt

    def record(self, name: str, dt: float, sampling: bool = False) -> None:
        self.calls[name] = self.calls.get(name, 0) + 1
        self.times[name] = self.times.get(name, 0.0) + dt
        if sampling:
            self.sampling_calls[name] = self.sampling_calls.get(name, 0) + 1

    def overhead_cost(self, key: str, wall: float) -> float:
        return self.cost_model.overhead(key) if self.cost_model is not None else wall

    @property
    def heuristic_time(self) -> float:
        return sum(self.times.values())

    @property
    def overhead_time(self) -> float:
        return self.sampling_time + self.labeling_time + self.classify_time + self.update_time
