"""Brute-force power-set BFS used to cross-check the search."""

from __future__ import annotations

from collections import deque

from .dfa import Dfa

MAX_ORACLE_STATES = 24


def brute_force_shortest(d: Dfa) -> tuple[int, list[int]] | None:
    """Shortest reset word by BFS over all images of the full state set.

    Returns ``(length, word)`` or None for non-synchronizing automata.
    Refuses automata above :data:`MAX_ORACLE_STATES` states.
    """
    if d.n > MAX_ORACLE_STATES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_STATES} states, got {d.n}")
    cols = d.columns
    start = (1 << d.n) - 1
    parent = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if not s & (s - 1):
            word = []
            while parent[s] is not None:
                s, a = parent[s]
                word.append(a)
            word.reverse()
            return len(word), word
        for a, col in enumerate(cols):
            t = 0
            r = s
            while r:
                low = r & -r
                t |= 1 << col[low.bit_length() - 1]
                r ^= low
            if t not in parent:
                parent[t] = (s, a)
                queue.append(t)
    return None
