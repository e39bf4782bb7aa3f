"""Incremental binary classifiers over raw state-variable values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K

H1 = 0  # the cheap heuristic
H2 = 1  # the expensive one


@dataclass(frozen=True)
class Prediction:
    label: int
    confidence: float


class Classifier:
    def update(self, x: Sequence[int], y: int) -> None:
        raise NotImplementedError

    def classify(self, x: Sequence[int]) -> Prediction:
        raise NotImplementedError

    def fit(self, xs, ys) -> "Classifier":
        for x, y in zip(xs, ys):
            self.update(x, y)
        return self


class NaiveBayes(Classifier):
    """Categorical Naive Bayes with Laplace-1 smoothing, scored in log space.

    Counts live in one ``(sum of domain sizes, 2)`` table so that an update is
    a single fancy-index increment and classification a single kernel call.
    """

    def __init__(self, domain_sizes: Sequence[int], use_numba: bool | None = None):
        self.domain_sizes = np.asarray(domain_sizes, dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.domain_sizes)[:-1]]).astype(np.int64)
        self.counts = np.zeros((int(self.domain_sizes.sum()), 2), dtype=np.float64)
        self.class_counts = np.zeros(2, dtype=np.float64)
        use = K.USE_NUMBA if use_numba is None else use_numba and K.HAVE_NUMBA
        self._kernel = K.nb_log_joint_jit if use else K.nb_log_joint_np
        self._out = np.empty(2, dtype=np.float64)
        self._x = np.empty(len(self.domain_sizes), dtype=np.int64)
        if use:
            self._x[:] = 0
            self._kernel(self.counts, self.class_counts, self.offsets, self.domain_sizes, self._x, self._out)

    def _vec(self, x) -> np.ndarray:
        self._x[:] = x
        return self._x

    def update(self, x, y: int) -> None:
        xv = self._vec(x)
        self.counts[self.offsets + xv, y] += 1.0
        self.class_counts[y] += 1.0

    def log_joint(self, x) -> np.ndarray:
        self._kernel(self.counts, self.class_counts, self.offsets, self.domain_sizes, self._vec(x), self._out)
        return self._out

    def classify(self, x) -> Prediction:
        l1, l2 = self.log_joint(x)
        label = H2 if l2 > l1 else H1
        # posterior of the winner: 1 / (1 + exp(loser - winner))
        d = -abs(l2 - l1)
        return Prediction(label, 1.0 / (1.0 + math.exp(d)))

    @property
    def n_examples(self) -> int:
        return int(self.class_counts.sum())


class KNN(Classifier):
    """Unweighted k-nearest-neighbour vote under Euclidean distance on value indices."""

    def __init__(self, n_features: int, k: int = 3):
        if k < 1 or k % 2 == 0:
            raise ValueError("k must be a positive odd integer")
        self.k = k
        self._xs = np.empty((64, n_features), dtype=np.float64)
        self._ys = np.empty(64, dtype=np.int64)
        self.n = 0

    def update(self, x, y: int) -> None:
        if self.n == len(self._ys):
            self._xs = np.concatenate([self._xs, np.empty_like(self._xs)])
            self._ys = np.concatenate([self._ys, np.empty_like(self._ys)])
        self._xs[self.n] = x
        self._ys[self.n] = y
        self.n += 1

    def classify(self, x) -> Prediction:
        if self.n == 0:
            return Prediction(H1, 0.5)
        d = np.sum((self._xs[: self.n] - np.asarray(x, dtype=np.float64)) ** 2, axis=1)
        k = min(self.k, self.n)
        # stable sort: equal distances resolve to the earlier-stored example
        idx = np.argsort(d, kind="stable")[:k]
        votes = int(self._ys[idx].sum())
        label = H2 if votes * 2 > k else H1
        won = votes if label == H2 else k - votes
        return Prediction(label, won / k)


def parse_classifier(spec: str) -> tuple[str, int]:
    """``"nb"`` or ``"knn:<k>"`` into (kind, k)."""
    spec = spec.strip().lower()
    if spec == "nb":
        return "nb", 0
    if spec.startswith("knn"):
        _, _, k = spec.partition(":")
        k = int(k) if k else 3
        if k < 1 or k % 2 == 0:
            raise ValueError("knn needs a positive odd k")
        return "knn", k
    raise ValueError(f"unknown classifier {spec!r}; expected nb or knn:<k>")


def make_classifier(spec: str, domain_sizes: Sequence[int]) -> Classifier:
    kind, k = parse_classifier(spec)
    if kind == "nb":
        return NaiveBayes(domain_sizes)
    return KNN(len(domain_sizes), k)
