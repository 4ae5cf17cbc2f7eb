"""Complete deterministic automata over dense state/letter indices.

State sets are plain Python ints used as bit vectors: bit ``q`` is set iff
state ``q`` is a member.  This keeps images, inclusion tests and hashing cheap.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

StateSet = int

_CHUNK = 8
_CHUNK_MASK = (1 << _CHUNK) - 1


class AutomatonError(ValueError):
    """Raised for malformed automata or out-of-range letters/states."""


class ParseError(AutomatonError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def popcount(s: StateSet) -> int:
    return s.bit_count()


def states_of(s: StateSet) -> list[int]:
    """Ascending list of the states in ``s``."""
    out = []
    while s:
        low = s & -s
        out.append(low.bit_length() - 1)
        s ^= low
    return out


def make_set(states: Iterable[int]) -> StateSet:
    s = 0
    for q in states:
        s |= 1 << q
    return s


def full_set(n: int) -> StateSet:
    return (1 << n) - 1


def to_words(s: StateSet, words: int) -> np.ndarray:
    """Little-endian uint64 word row of ``s``."""
    return np.frombuffer(s.to_bytes(8 * words, "little"), dtype="<u8").astype(np.uint64)


def from_words(row: np.ndarray) -> StateSet:
    return int.from_bytes(np.ascontiguousarray(row, dtype="<u8").tobytes(), "little")


def _word_tables(target_sets: Sequence[Sequence[int]], n: int) -> np.ndarray:
    from ._kernels import chunk_tables

    w = (n + 63) // 64
    targets = np.zeros((len(target_sets), n, w), np.uint64)
    for a, letter in enumerate(target_sets):
        for q, s in enumerate(letter):
            targets[a, q] = to_words(s, w)
    return chunk_tables(targets)


def _chunk_tables(targets: Sequence[int], n: int) -> tuple[tuple[int, ...], ...]:
    """Lookup tables mapping each 8-bit slice of a set to the union of ``targets``.

    ``targets[q]`` is the bitmask contributed by state ``q``.  The union over a
    set is then an OR of one table entry per slice.
    """
    tables = []
    for base in range(0, n, _CHUNK):
        width = min(_CHUNK, n - base)
        tab = [0] * (1 << _CHUNK)
        for c in range(1, 1 << width):
            low = c & -c
            tab[c] = tab[c ^ low] | targets[base + low.bit_length() - 1]
        tables.append(tuple(tab))
    return tuple(tables)


def map_set(tables: tuple[tuple[int, ...], ...], s: StateSet) -> StateSet:
    r = 0
    for tab in tables:
        if not s:
            break
        r |= tab[s & _CHUNK_MASK]
        s >>= _CHUNK
    return r


@dataclass(frozen=True, eq=False)
class Dfa:
    """A complete DFA with ``n`` states and ``k`` letters.

    ``delta[q][a]`` is the state reached from ``q`` by letter ``a``.
    """

    n: int
    k: int
    delta: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise AutomatonError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        delta = tuple(tuple(int(t) for t in row) for row in self.delta)
        if len(delta) != self.n:
            raise AutomatonError(f"expected {self.n} rows, got {len(delta)}")
        for q, row in enumerate(delta):
            if len(row) != self.k:
                raise AutomatonError(f"state {q}: expected {self.k} transitions, got {len(row)}")
            for t in row:
                if not 0 <= t < self.n:
                    raise AutomatonError(f"state {q}: target {t} out of range [0, {self.n - 1}]")
        object.__setattr__(self, "delta", delta)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "Dfa":
        """Build from one transformation per letter, ``columns[a][q] = δ(q, a)``."""
        n = len(columns[0])
        return cls(n, len(columns), tuple(zip(*columns)))

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return self.delta == other.delta and self.k == other.k

    def __hash__(self):
        return hash((self.n, self.k, self.delta))

    @cached_property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(row[a] for row in self.delta) for a in range(self.k))

    @cached_property
    def image_tables(self):
        return tuple(
            _chunk_tables([1 << t for t in col], self.n) for col in self.columns
        )

    @cached_property
    def word_tables(self) -> np.ndarray:
        """Image tables over word rows, see :func:`resetword._kernels.chunk_tables`."""
        return _word_tables([[1 << t for t in col] for col in self.columns], self.n)

    @property
    def words(self) -> int:
        return (self.n + 63) // 64

    @cached_property
    def inverse(self) -> "InverseDfa":
        return InverseDfa.from_dfa(self)

    @property
    def states(self) -> StateSet:
        return full_set(self.n)

    def _check_letter(self, a: int):
        if not 0 <= a < self.k:
            raise AutomatonError(f"letter {a} out of range [0, {self.k - 1}]")


@dataclass(frozen=True, eq=False)
class InverseDfa:
    """Preimage lists: ``preimages[a][t]`` lists every ``q`` with δ(q, a) = t."""

    n: int
    k: int
    preimages: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def from_dfa(cls, d: Dfa) -> "InverseDfa":
        pre = []
        for col in d.columns:
            lists: list[list[int]] = [[] for _ in range(d.n)]
            for q, t in enumerate(col):
                lists[t].append(q)
            pre.append(tuple(tuple(x) for x in lists))
        return cls(d.n, d.k, tuple(pre))

    @cached_property
    def preimage_masks(self) -> tuple[tuple[StateSet, ...], ...]:
        return tuple(tuple(make_set(lst) for lst in letter) for letter in self.preimages)

    @cached_property
    def preimage_tables(self):
        return tuple(_chunk_tables(masks, self.n) for masks in self.preimage_masks)

    @cached_property
    def word_tables(self) -> np.ndarray:
        return _word_tables(self.preimage_masks, self.n)


def apply_letter(d: Dfa, s: StateSet, a: int) -> StateSet:
    d._check_letter(a)
    return map_set(d.image_tables[a], s)


def apply_word(d: Dfa, s: StateSet, word: Iterable[int]) -> StateSet:
    for a in word:
        s = apply_letter(d, s, a)
    return s


def apply_letter_inverse(inv: InverseDfa, s: StateSet, a: int) -> StateSet:
    if not 0 <= a < inv.k:
        raise AutomatonError(f"letter {a} out of range [0, {inv.k - 1}]")
    return map_set(inv.preimage_tables[a], s)


class PairAutomaton:
    """Backward BFS over unordered state pairs, rooted at the diagonal.

    ``letter[p][q]`` is the first letter of a shortest word merging ``p`` and
    ``q`` (-1 if they cannot be merged) and ``dist[p][q]`` its length.
    """

    def __init__(self, d: Dfa):
        n = d.n
        pre = d.inverse.preimages
        dist = [[-1] * n for _ in range(n)]
        letter = [[-1] * n for _ in range(n)]
        queue = deque()
        for r in range(n):
            dist[r][r] = 0
            queue.append((r, r))
        while queue:
            r, s = queue.popleft()
            nd = dist[r][s] + 1
            for a in range(d.k):
                pr, ps = pre[a][r], pre[a][s]
                for p in pr:
                    row = dist[p]
                    for q in ps:
                        if row[q] < 0:
                            row[q] = dist[q][p] = nd
                            letter[p][q] = letter[q][p] = a
                            queue.append((p, q))
        self.d = d
        self.dist = dist
        self.letter = letter

    def all_pairs_mergeable(self) -> bool:
        return all(x >= 0 for row in self.dist for x in row)

    def merging_word(self, p: int, q: int) -> list[int]:
        word = []
        delta = self.d.delta
        while p != q:
            a = self.letter[p][q]
            if a < 0:
                raise AutomatonError(f"states {p} and {q} cannot be merged")
            word.append(a)
            p, q = delta[p][a], delta[q][a]
        return word

    def greedy_word(self, s: StateSet) -> list[int]:
        """A reset word for ``s`` built by repeatedly merging the closest pair.

        Only an upper bound; used to cap depth-limited searches.
        """
        word: list[int] = []
        d = self.d
        while s & (s - 1):
            members = states_of(s)
            best = None
            for i, p in enumerate(members):
                row = self.dist[p]
                for q in members[i + 1:]:
                    if best is None or row[q] < best[0]:
                        best = (row[q], p, q)
            part = self.merging_word(best[1], best[2])
            word.extend(part)
            s = apply_word(d, s, part)
        return word


def is_synchronizing(d: Dfa) -> bool:
    """True iff some word maps every state to one state.

    Uses the pair criterion: every pair of states must be mergeable.
    """
    if d.n == 1:
        return True
    return PairAutomaton(d).all_pairs_mergeable()


def closure(d: Dfa, s: StateSet) -> StateSet:
    """Smallest superset of ``s`` closed under every letter."""
    tables = d.image_tables
    frontier = s
    while frontier:
        new = 0
        for tab in tables:
            new |= map_set(tab, frontier)
        frontier = new & ~s
        s |= frontier
    return s


def induced(d: Dfa, keep: StateSet) -> tuple[Dfa, dict[int, int]]:
    """Sub-automaton on a transition-closed state set, with the old->new index map."""
    kept = states_of(keep)
    mapping = {q: i for i, q in enumerate(kept)}
    try:
        rows = [tuple(mapping[t] for t in d.delta[q]) for q in kept]
    except KeyError as exc:
        raise AssertionError(f"state set is not transition-closed: {exc}") from None
    return Dfa(len(kept), d.k, tuple(rows)), mapping


def reduce_reachable(d: Dfa, warmup_steps: int = 3) -> tuple[Dfa, dict[int, int]]:
    """Drop states that become unreachable after a few forward BFS levels.

    The union of the last level's sets is closed under all letters and the
    induced sub-automaton is returned together with the old->new mapping.
    """
    from .search import warmup

    if warmup_steps < 0:
        raise AutomatonError("warmup_steps must be >= 0")
    frontier = warmup(d, warmup_steps)[-1]
    reach = 0
    for s in frontier.state_sets():
        reach |= s
    return induced(d, closure(d, reach))


def remap_set(s: StateSet, mapping: dict[int, int]) -> StateSet:
    return make_set(mapping[q] for q in states_of(s))


def _tokens(line: str) -> list[tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line.split("#", 1)[0])]


def _ints(lineno: int, tokens: list[tuple[int, str]]) -> list[int]:
    out = []
    for col, tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}", lineno, col) from None
    return out


def parse_dfa(text: str) -> Dfa:
    """Parse the ``n k`` header followed by ``n`` rows of ``k`` targets.

    Blank lines and ``#`` comments are ignored.
    """
    rows = [(i, t) for i, line in enumerate(text.splitlines(), 1) if (t := _tokens(line))]
    if not rows:
        raise ParseError("empty input, expected header 'n k'", 1)
    lineno, tokens = rows[0]
    header = _ints(lineno, tokens)
    if len(header) != 2:
        raise ParseError(f"header must be 'n k', got {len(header)} values", lineno)
    n, k = header
    if n < 1 or k < 1:
        raise ParseError(f"need n >= 1 and k >= 1, got n={n}, k={k}", lineno)
    body = rows[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (body[-1][0] + 1 if body else lineno + 1)
        raise ParseError(f"expected {n} transition rows, got {len(body)}", where)
    delta = []
    for lineno, tokens in body:
        row = _ints(lineno, tokens)
        if len(row) != k:
            raise ParseError(f"expected {k} targets, got {len(row)}", lineno)
        for (col, _), t in zip(tokens, row):
            if not 0 <= t < n:
                raise ParseError(f"target {t} out of range [0, {n - 1}]", lineno, col)
        delta.append(tuple(row))
    return Dfa(n, k, tuple(delta))


def format_dfa(d: Dfa) -> str:
    lines = [f"{d.n} {d.k}"]
    lines.extend(" ".join(map(str, row)) for row in d.delta)
    return "\n".join(lines) + "\n"


def parse_dfas(text: str) -> list[Dfa]:
    """Parse several automata separated by blank lines."""
    out = []
    block: list[str] = []
    offset = 0
    for lineno, line in enumerate(text.splitlines() + [""], 1):
        if line.strip():
            if not block:
                offset = lineno - 1
            block.append(line)
        elif block:
            try:
                out.append(parse_dfa("\n".join(block)))
            except ParseError as exc:
                raise ParseError(str(exc).split(": ", 1)[1], exc.line + offset, exc.column) from None
            block = []
    return out
