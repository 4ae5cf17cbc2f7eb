"""scikit-learn style wrappers around the solver and the length model."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dfa import Dfa, parse_dfa
from .search import NotSynchronizingError, SearchConfig, shortest_reset_word


def check_automata(X) -> list[Dfa]:
    """Accept a Dfa, a sequence of Dfa objects, or automaton texts."""
    if isinstance(X, (Dfa, str)):
        X = [X]
    out = []
    for i, item in enumerate(X):
        if isinstance(item, str):
            item = parse_dfa(item)
        if not isinstance(item, Dfa):
            raise TypeError(f"item {i} is {type(item).__name__}, expected Dfa or automaton text")
        out.append(item)
    if not out:
        raise ValueError("no automata given")
    return out


class ResetWordSolver(TransformerMixin, BaseEstimator):
    """Shortest reset word lengths as a stateless transformer.

    ``transform`` returns one row ``[synchronizing, length]`` per automaton,
    with length -1 when there is no reset word.  ``predict`` returns the
    length column alone.  After a call, ``words_`` holds the witnesses.
    """

    def __init__(self, ibfs_weight=None, warmup_steps=3, memory_limit=1 << 30, reconstruct_word=True):
        self.ibfs_weight = ibfs_weight
        self.warmup_steps = warmup_steps
        self.memory_limit = memory_limit
        self.reconstruct_word = reconstruct_word

    def _config(self) -> SearchConfig:
        return SearchConfig(
            ibfs_weight=self.ibfs_weight,
            warmup_steps=self.warmup_steps,
            memory_limit=self.memory_limit,
            reconstruct_word=self.reconstruct_word,
        )

    def fit(self, X, y=None):
        check_automata(X)
        self.config_ = self._config()
        return self

    def transform(self, X):
        cfg = getattr(self, "config_", None) or self._config()
        rows, words = [], []
        for d in check_automata(X):
            try:
                res = shortest_reset_word(d, cfg)
            except NotSynchronizingError:
                rows.append((0, -1))
                words.append(None)
                continue
            rows.append((1, res.length))
            words.append(res.word)
        self.words_ = words
        return np.array(rows, dtype=np.int64)

    def predict(self, X):
        return self.transform(X)[:, 1]


class SqrtLengthModel(RegressorMixin, BaseEstimator):
    """Least squares fit of ``y ≈ a * sqrt(n - b)``.

    For a fixed ``b`` the best ``a`` has a closed form, so only ``b`` is
    searched: a grid over ``b_range`` locates the basin and a bounded scalar
    minimization refines it.  Every ``n`` must exceed ``b_range[1]``.
    """

    def __init__(self, b_range=(-20.0, 15.0), grid=701):
        self.b_range = b_range
        self.grid = grid

    @staticmethod
    def _best_a(n, y, b):
        r = np.sqrt(n - b)
        return float(r @ y / (r @ r))

    @classmethod
    def _rss(cls, n, y, b):
        a = cls._best_a(n, y, b)
        return float(np.sum((y - a * np.sqrt(n - b)) ** 2))

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=3, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError("X must hold a single column of state counts")
        n = X[:, 0].astype(float)
        y = y.astype(float)
        lo, hi = self.b_range
        if len(np.unique(n)) < 3:
            raise ValueError("need at least three distinct n values")
        if n.min() <= hi:
            raise ValueError(f"every n must exceed the b search bound {hi}")
        if not np.all(np.isfinite(y)):
            raise ValueError("targets must be finite")
        grid = np.linspace(lo, hi, self.grid)
        losses = np.array([self._rss(n, y, b) for b in grid])
        j = int(np.argmin(losses))
        a_lo, a_hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
        opt = minimize_scalar(lambda b: self._rss(n, y, b), bounds=(a_lo, a_hi), method="bounded",
                              options={"xatol": 1e-12})
        b = float(opt.x) if opt.fun <= losses[j] else float(grid[j])
        self.b_ = b
        self.a_ = self._best_a(n, y, b)
        self.rss_ = self._rss(n, y, b)
        return self

    def predict(self, X):
        check_is_fitted(self, ("a_", "b_"))
        X = check_array(X)
        return self.a_ * np.sqrt(X[:, 0] - self.b_)


def fit_pairs(ns: Sequence[float], lengths: Sequence[float]) -> tuple[float, float, float]:
    """``(a, b, rss)`` for plain lists of n and mean lengths."""
    m = SqrtLengthModel().fit(np.asarray(ns, dtype=float).reshape(-1, 1), lengths)
    if not math.isfinite(m.rss_):
        raise ValueError("fit did not converge")
    return m.a_, m.b_, m.rss_
