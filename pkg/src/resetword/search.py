"""Exact shortest reset words by bidirectional subset search.

The forward side walks images of the full state set, the backward side walks
preimages of singletons.  Each side keeps a trie of visited sets and reduces
every new level to an antichain; the search stops at the first level where a
backward set contains a forward set.

Frontier sets are rows of uint64 words (see :mod:`resetword._kernels`).
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .dfa import (
    Dfa,
    InverseDfa,
    PairAutomaton,
    StateSet,
    apply_word,
    closure,
    from_words,
    induced,
    is_synchronizing,
    remap_set,
    to_words,
)
from .trie import Keep, SubsetTrie, sets_to_rows


# visited tries smaller than this are never rebuilt
_REBUILD_FLOOR = 1 << 16


class NotSynchronizingError(ValueError):
    """The automaton has no reset word."""


class SearchResourceError(MemoryError):
    """The search ran out of its resource budget and cannot recover."""


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass
class SearchConfig:
    """Tuning knobs for :func:`shortest_reset_word`.

    ``ibfs_weight`` defaults to the alphabet size.  ``memory_limit`` bounds
    the estimated bytes held by tries and frontiers; past it the search drops
    its visited tries and continues depth-first.  A visited trie is reduced to
    an antichain whenever it has grown ``rebuild_threshold`` times since its
    last reduction.  Fallback lists longer than ``fallback_split`` are cut into
    ``fallback_chunks`` pieces.
    """

    ibfs_weight: float | None = None
    warmup_steps: int = 3
    memory_limit: int = 1 << 30
    rebuild_threshold: float = 2.0
    reconstruct_word: bool = True
    fallback_split: int = 1024
    fallback_chunks: int = 8

    def __post_init__(self):
        if self.ibfs_weight is not None and self.ibfs_weight <= 0:
            raise ValueError("ibfs_weight must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be >= 0")
        if self.memory_limit < 0:
            raise ValueError("memory_limit must be >= 0")
        if self.rebuild_threshold <= 1:
            raise ValueError("rebuild_threshold must exceed 1")
        if self.fallback_split < 1 or self.fallback_chunks < 2:
            raise ValueError("fallback_split must be >= 1 and fallback_chunks >= 2")


@dataclass
class Frontier:
    """One search level.

    ``sets`` holds one word row per entry; ``parents[i]`` and ``letters[i]``
    say which entry of the previous level produced entry ``i`` and by which
    letter.  ``trie`` holds exactly these sets when the level came from a step.
    """

    direction: Direction
    depth: int
    sets: np.ndarray
    parents: np.ndarray
    letters: np.ndarray
    trie: SubsetTrie | None = field(default=None, repr=False)

    def __len__(self):
        return self.sets.shape[0]

    def state_sets(self) -> list[StateSet]:
        return [from_words(row) for row in self.sets]

    @classmethod
    def from_sets(cls, direction: Direction, depth: int, sets: Sequence[StateSet], n: int) -> "Frontier":
        m = len(sets)
        rows = sets_to_rows(sets, n)
        return cls(direction, depth, rows, np.full(m, -1, np.int64), np.full(m, -1, np.int64))


@dataclass
class SearchStats:
    forward_steps: int = 0
    backward_steps: int = 0
    warmup_steps: int = 0
    peak_sets: int = 0
    trie_visits: int = 0
    reduced_states: int = 0
    used_fallback: bool = False
    wall_time: float = 0.0


@dataclass
class SearchResult:
    length: int
    word: tuple[int, ...] | None
    stats: SearchStats = field(default_factory=SearchStats)


def initial_forward(d: Dfa) -> Frontier:
    return Frontier.from_sets(Direction.FORWARD, 0, [d.states], d.n)


def initial_backward(n: int) -> Frontier:
    return Frontier.from_sets(Direction.BACKWARD, 0, [1 << q for q in range(n)], n)


def _finish_level(direction: Direction, depth: int, new, parents, letters, n: int) -> Frontier:
    minimal = direction is Direction.FORWARD
    idx, arena = K.antichain(new, minimal)
    sizes = K.popcounts(new[idx])
    # ascending sizes for images, descending for preimages
    idx = idx[np.argsort(sizes if minimal else -sizes, kind="stable")]
    trie = SubsetTrie._wrap(n, Keep.MINIMAL if minimal else Keep.MAXIMAL, arena)
    return Frontier(direction, depth, new[idx], parents[idx], letters[idx], trie)


def bfs_step(d: Dfa, f: Frontier, visited: SubsetTrie) -> Frontier:
    """Images of every frontier set by every letter, skipping visited ones.

    An image containing a visited set is dropped; the rest are recorded as
    visited and the new level is reduced to its ⊆-minimal sets.
    """
    if f.direction is not Direction.FORWARD:
        raise ValueError("bfs_step needs a forward frontier")
    visited._arena, new, parents, letters = K.expand(f.sets, d.word_tables, visited._arena, True)
    return _finish_level(Direction.FORWARD, f.depth + 1, new, parents, letters, d.n)


def ibfs_step(inv: InverseDfa, f: Frontier, visited: SubsetTrie) -> Frontier:
    """Dual of :func:`bfs_step`: preimages, superset skipping, ⊆-maximal result.

    Empty preimages are dropped.
    """
    if f.direction is not Direction.BACKWARD:
        raise ValueError("ibfs_step needs a backward frontier")
    visited._arena, new, parents, letters = K.expand(f.sets, inv.word_tables, visited._arena, False)
    return _finish_level(Direction.BACKWARD, f.depth + 1, new, parents, letters, inv.n)


def choose_step(forward: Frontier, backward: Frontier, cfg: SearchConfig, k: int = 2) -> Direction:
    """Expand the side with the smaller weighted list; ties go forward."""
    weight = cfg.ibfs_weight if cfg.ibfs_weight is not None else k
    if len(forward) <= weight * len(backward):
        return Direction.FORWARD
    return Direction.BACKWARD


def meet_check(backward: Frontier, bfs_trie: SubsetTrie) -> tuple[int, StateSet] | None:
    """First backward entry containing a set of the forward trie, with that set."""
    i, slot = K.meet(backward.sets, bfs_trie._arena)
    if i < 0:
        return None
    return int(i), from_words(bfs_trie._arena[3][slot])


def _chain(levels: Sequence[Frontier], index: int) -> list[int]:
    """Letters on the provenance chain ending at ``levels[-1]`` entry ``index``,
    newest first."""
    out = []
    for level in reversed(levels):
        if level.depth == 0:
            break
        out.append(int(level.letters[index]))
        index = int(level.parents[index])
    return out


def reconstruct_word(
    meet: tuple[int, StateSet],
    forward_levels: Sequence[Frontier],
    backward_levels: Sequence[Frontier],
) -> list[int]:
    """Forward letters into the met set followed by the backward letters out of it.

    Forward chains are stored child-to-parent and get reversed; a backward
    chain already reads in application order.
    """
    b_index, x = meet
    last = forward_levels[-1]
    f_index = K.find_row(last.sets, to_words(x, last.sets.shape[1]))
    if f_index < 0:
        raise ValueError("met set is not on the last forward level")
    word = _chain(forward_levels, int(f_index))
    word.reverse()
    word.extend(_chain(backward_levels, b_index))
    return word


def _memory_estimate(*parts) -> int:
    """Approximate bytes held by tries and frontiers."""
    total = 0
    for p in parts:
        if isinstance(p, SubsetTrie):
            total += p.node_count * (32 + 16 * p.words) + p.stored_count * 8 * p.words
        else:
            total += len(p) * (8 * p.sets.shape[1] + 16)
    return total


def warmup(d: Dfa, steps: int) -> list[Frontier]:
    """Up to ``steps`` forward levels on the full automaton.

    Stops early once a level holds a singleton.
    """
    levels = [initial_forward(d)]
    visited = SubsetTrie(d.n)
    visited.insert(d.states)
    for _ in range(steps):
        if K.first_singleton(levels[-1].sets) >= 0:
            break
        levels.append(bfs_step(d, levels[-1], visited))
    return levels


@dataclass
class _Branch:
    """A list explored by the fallback, linked to the list it was expanded from."""

    sets: np.ndarray
    parents: np.ndarray
    letters: np.ndarray
    depth: int
    up: "_Branch | None"

    def word_to(self, i: int) -> tuple[int, list[int]]:
        """Root index and letters leading to entry ``i``."""
        word = []
        node = self
        while node.up is not None:
            word.append(int(node.letters[i]))
            i = int(node.parents[i])
            node = node.up
        word.reverse()
        return int(node.parents[i]), word


def hybrid_fallback(
    d: Dfa,
    last_frontier: Frontier,
    best_known: int | None = None,
    cfg: SearchConfig | None = None,
    prefix: Callable[[int], Sequence[int]] | None = None,
) -> SearchResult:
    """Depth-first continuation from a forward level without visited tries.

    Lists longer than ``cfg.fallback_split`` are cut into chunks of increasing
    set size explored one at a time; shorter lists take one image step reduced
    to minimal sets.  Depth is capped by the shortest total length found so
    far, seeded by a greedy pair-merging word (or ``best_known`` if smaller).

    ``prefix(i)`` returns the word leading to entry ``i`` of ``last_frontier``;
    without it the returned word starts at that entry.  The returned length
    always counts ``last_frontier.depth``.
    """
    cfg = cfg or SearchConfig()
    start = time.perf_counter()
    depth0 = last_frontier.depth
    sets = last_frontier.sets
    pairs = PairAutomaton(d)
    sizes = K.popcounts(sets)
    best_len, best_root, best_suffix = None, -1, None
    for i in np.argsort(sizes, kind="stable")[:16]:
        g = pairs.greedy_word(from_words(sets[i]))
        if best_len is None or depth0 + len(g) < best_len:
            best_len, best_root, best_suffix = depth0 + len(g), int(i), g
    if best_known is not None and best_known < best_len:
        # only the length is known; a strictly shorter hit must replace it
        best_len, best_root, best_suffix = best_known, -1, None

    tab = d.word_tables
    m = len(last_frontier)
    root = _Branch(sets, np.arange(m), np.full(m, -1, np.int64), depth0, None)
    stack = [root]
    while stack:
        branch = stack.pop()
        depth = branch.depth
        if depth >= best_len:
            continue
        hit = K.first_singleton(branch.sets)
        if hit >= 0:
            best_len = depth
            best_root, best_suffix = branch.word_to(int(hit))
            continue
        if depth + 1 >= best_len:
            continue
        if len(branch.sets) > cfg.fallback_split:
            order = np.argsort(K.popcounts(branch.sets), kind="stable")
            # smallest sets explored first, so pushed last
            for piece in reversed(np.array_split(order, cfg.fallback_chunks)):
                stack.append(
                    _Branch(branch.sets[piece], branch.parents[piece], branch.letters[piece], depth, branch.up)
                )
            continue
        new, parents, letters = K.expand_all(branch.sets, tab)
        sizes = K.popcounts(new)
        # the reduction walks back to front, so larger sets go first
        order = np.argsort(-sizes, kind="stable")
        new, parents, letters = new[order], parents[order], letters[order]
        idx, _ = K.antichain(new, True)
        stack.append(_Branch(new[idx], parents[idx], letters[idx], depth + 1, branch))

    if best_suffix is None:
        raise SearchResourceError("fallback found no word within the supplied bound")
    word = tuple(best_suffix)
    if prefix is not None:
        word = tuple(prefix(best_root)) + word
    stats = SearchStats(used_fallback=True, wall_time=time.perf_counter() - start)
    return SearchResult(best_len, word, stats)


def shortest_reset_word(d: Dfa, cfg: SearchConfig | None = None) -> SearchResult:
    """Length (and a witness) of a shortest reset word of ``d``.

    The witness is checked against ``d`` before returning.

    Raises
    ------
    NotSynchronizingError
        If ``d`` has no reset word.
    """
    cfg = cfg or SearchConfig()
    start = time.perf_counter()
    if not is_synchronizing(d):
        raise NotSynchronizingError("automaton is not synchronizing")
    stats = SearchStats()

    def done(length, word):
        word = tuple(word)
        img = apply_word(d, d.states, word)
        if len(word) != length or img & (img - 1):
            raise AssertionError(f"reconstructed word {word} does not reset the automaton")
        stats.wall_time = time.perf_counter() - start
        return SearchResult(length, word if cfg.reconstruct_word else None, stats)

    flevels = warmup(d, cfg.warmup_steps)
    last = flevels[-1]
    stats.warmup_steps = last.depth
    hit = K.first_singleton(last.sets)
    if hit >= 0:
        return done(last.depth, reversed(_chain(flevels, int(hit))))

    # restrict to the states still reachable after the warmup levels
    reach = 0
    for s in last.state_sets():
        reach |= s
    red, mapping = induced(d, closure(d, reach))
    n = red.n
    stats.reduced_states = n
    rows = sets_to_rows([remap_set(s, mapping) for s in last.state_sets()], n)
    forward = _finish_level(Direction.FORWARD, last.depth, rows, last.parents, last.letters, n)
    flevels[-1] = forward
    fvisited = SubsetTrie(n, Keep.MINIMAL)
    fvisited._arena = K.trie_from_ordered(rows, np.arange(len(rows)), True)[0]

    backward = initial_backward(n)
    blevels = [backward]
    bvisited = SubsetTrie(n, Keep.MAXIMAL)
    bvisited._arena = K.trie_from_ordered(backward.sets, np.arange(n), False)[0]
    inv = red.inverse
    f_mark = b_mark = _REBUILD_FLOOR
    visits = 0

    def prefix(i):
        return list(reversed(_chain(flevels, i)))

    while True:
        meet = meet_check(backward, forward.trie)
        if meet is not None:
            stats.trie_visits = visits + fvisited.visit_counter + bvisited.visit_counter
            return done(forward.depth + backward.depth, reconstruct_word(meet, flevels, blevels))
        stats.peak_sets = max(
            stats.peak_sets,
            fvisited.stored_count + bvisited.stored_count + len(forward) + len(backward),
        )
        if _memory_estimate(fvisited, bvisited, forward, backward) > cfg.memory_limit:
            stats.used_fallback = True
            stats.trie_visits = visits + fvisited.visit_counter + bvisited.visit_counter
            del fvisited, bvisited, blevels
            res = hybrid_fallback(red, forward, None, cfg, prefix)
            return done(res.length, res.word)
        if choose_step(forward, backward, cfg, red.k) is Direction.FORWARD:
            forward = bfs_step(red, forward, fvisited)
            flevels.append(forward)
            stats.forward_steps += 1
            if not len(forward):
                raise AssertionError("forward frontier emptied before meeting")
            if fvisited.stored_count >= cfg.rebuild_threshold * f_mark:
                visits += fvisited.visit_counter
                fvisited = fvisited.rebuild_minimal(Keep.MINIMAL)
                f_mark = max(fvisited.stored_count, _REBUILD_FLOOR)
        else:
            backward = ibfs_step(inv, backward, bvisited)
            blevels.append(backward)
            stats.backward_steps += 1
            if not len(backward):
                raise AssertionError("backward frontier emptied before meeting")
            if bvisited.stored_count >= cfg.rebuild_threshold * b_mark:
                visits += bvisited.visit_counter
                bvisited = bvisited.rebuild_minimal(Keep.MAXIMAL)
                b_mark = max(bvisited.stored_count, _REBUILD_FLOOR)
