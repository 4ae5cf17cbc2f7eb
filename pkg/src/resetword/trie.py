"""Compressed binary trie over state sets with subset and superset queries.

A node at depth ``d`` branches on the ``d``-th state of the testing order:
sets containing it go right, the rest go left.  A set is stored at the first
node on its path that no other stored set reaches.  Each node also carries the
intersection and union of the sets below it, so queries abandon a subtree as
soon as no set in it can qualify.

The arena itself lives in :mod:`resetword._kernels`; this class converts
between Python-int state sets and word rows.
"""

from __future__ import annotations

import enum
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from .dfa import StateSet, from_words, to_words


class InsertOutcome(enum.Enum):
    INSERTED = "inserted"
    REPLACED_LARGER = "replaced-larger"
    REPLACED_SMALLER = "replaced-smaller"
    ALREADY_SUBSUMED = "already-subsumed"


class Keep(enum.Enum):
    MINIMAL = "minimal"
    MAXIMAL = "maximal"


class SubsetTrie:
    """Set-of-sets container answering "is some stored set inside / around S?".

    Parameters
    ----------
    n : int
        Number of states; every stored set must fit in ``n`` bits.
    keep : {"minimal", "maximal"}
        Which end of an inclusion chain an insert keeps when it meets a
        comparable set on its own path.  Forward searches keep minimal sets,
        backward searches maximal ones.
    order : sequence of int, optional
        State testing order.  Defaults to ``0, 1, ..., n - 1``.

    Attributes
    ----------
    stored_count : int
        Number of sets currently stored.
    visit_counter : int
        Nodes touched by subset/superset queries since the last reset.
    """

    def __init__(self, n: int, keep: Keep | str = Keep.MINIMAL, order: Sequence[int] | None = None):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.words = (n + 63) // 64
        self.keep = Keep(keep)
        if order is not None and list(order) != list(range(n)):
            if sorted(order) != list(range(n)):
                raise ValueError("order must be a permutation of range(n)")
            self.order = tuple(order)
        else:
            self.order = None
        self._arena = K.trie_new(self.words, 16)

    @classmethod
    def _wrap(cls, n: int, keep: Keep, arena) -> "SubsetTrie":
        t = cls.__new__(cls)
        t.n, t.words, t.keep, t.order, t._arena = n, (n + 63) // 64, keep, None, arena
        return t

    @property
    def stored_count(self) -> int:
        return int(self._arena[4][1])

    @property
    def node_count(self) -> int:
        return int(self._arena[4][0])

    @property
    def visit_counter(self) -> int:
        return int(self._arena[4][2])

    def __len__(self):
        return self.stored_count

    def reset_counters(self):
        self._arena[4][2] = 0

    def visit_cost_report(self) -> tuple[int, int]:
        return self.stored_count, self.visit_counter

    def _row(self, s: StateSet) -> np.ndarray:
        if not 0 < s < 1 << self.n:
            if s == 0:
                raise ValueError("the empty set cannot be stored or queried")
            raise ValueError(f"set {s:#x} does not fit a trie over {self.n} states")
        if self.order is not None:
            s = sum(1 << i for i, q in enumerate(self.order) if s >> q & 1)
        return to_words(s, self.words)

    def _set(self, row: np.ndarray) -> StateSet:
        s = from_words(row)
        if self.order is not None:
            s = sum(1 << q for i, q in enumerate(self.order) if s >> i & 1)
        return s

    def insert(self, s: StateSet) -> InsertOutcome:
        """Store ``s`` unless its path already ends at a comparable set.

        In a minimal trie a stored superset met on the path is overwritten by
        ``s`` and a stored subset makes the insert a no-op; a maximal trie does
        the reverse.  Comparable sets elsewhere in the trie are left alone.
        """
        minimal = self.keep is Keep.MINIMAL
        self._arena, code = K.trie_insert(self._arena, self._row(s), minimal)
        if code == K.INSERTED:
            return InsertOutcome.INSERTED
        if code == K.SUBSUMED:
            return InsertOutcome.ALREADY_SUBSUMED
        return InsertOutcome.REPLACED_LARGER if minimal else InsertOutcome.REPLACED_SMALLER

    def find_subset_of(self, s: StateSet) -> StateSet | None:
        """Some stored ``X`` with ``X ⊆ s``, or None."""
        slot = K.trie_find_subset(self._arena, self._row(s))
        return None if slot < 0 else self._set(self._arena[3][slot])

    def find_superset_of(self, s: StateSet) -> StateSet | None:
        """Some stored ``X`` with ``X ⊇ s``, or None."""
        slot = K.trie_find_superset(self._arena, self._row(s))
        return None if slot < 0 else self._set(self._arena[3][slot])

    def contains_subset_of(self, s: StateSet) -> bool:
        return K.trie_find_subset(self._arena, self._row(s)) >= 0

    def contains_superset_of(self, s: StateSet) -> bool:
        return K.trie_find_superset(self._arena, self._row(s)) >= 0

    def __contains__(self, s: StateSet) -> bool:
        return bool(K.trie_contains(self._arena, self._row(s)))

    def stored_rows(self) -> np.ndarray:
        return self._arena[3][: self.stored_count]

    def __iter__(self) -> Iterator[StateSet]:
        return (self._set(row) for row in self.stored_rows())

    def dump(self) -> str:
        """One stored set per line as a bitstring, state 0 first."""
        return "".join(
            "".join("1" if x >> q & 1 else "0" for q in range(self.n)) + "\n" for x in self
        )

    def rebuild_minimal(self, keep: Keep | str | None = None) -> "SubsetTrie":
        """Fresh trie holding only the ⊆-minimal (or ⊆-maximal) stored sets."""
        keep = self.keep if keep is None else Keep(keep)
        minimal = keep is Keep.MINIMAL
        rows = self.stored_rows()
        sizes = K.popcounts(rows)
        order = np.argsort(sizes if minimal else -sizes, kind="stable")
        arena, _ = K.trie_from_ordered(rows, order, minimal)
        out = SubsetTrie._wrap(self.n, keep, arena)
        out.order = self.order
        return out


def sets_to_rows(sets: Sequence[StateSet], n: int) -> np.ndarray:
    w = (n + 63) // 64
    rows = np.empty((len(sets), w), np.uint64)
    for i, s in enumerate(sets):
        if not 0 < s < 1 << n:
            raise ValueError(f"set {s:#x} is empty or does not fit {n} states")
        rows[i] = to_words(s, w)
    return rows


def reduce_list_to_antichain(
    sets: Sequence[StateSet],
    keep: Keep | str,
    n: int,
    return_trie: bool = False,
) -> list[StateSet] | tuple[list[StateSet], SubsetTrie]:
    """Drop every set that has a strictly smaller (larger) comparable set in ``sets``.

    The list is walked backwards and checked against an auxiliary trie, so for
    ``keep="minimal"`` it must list larger sets before their subsets; the
    bidirectional search produces lists with exactly that property.  The order
    of survivors is preserved.  Duplicates collapse to their last occurrence.
    """
    keep = Keep(keep)
    if not sets:
        kept: list[StateSet] = []
        trie = SubsetTrie(n, keep)
    else:
        idx, arena = K.antichain(sets_to_rows(sets, n), keep is Keep.MINIMAL)
        kept = [sets[i] for i in idx]
        trie = SubsetTrie._wrap(n, keep, arena)
    if return_trie:
        return kept, trie
    return kept
