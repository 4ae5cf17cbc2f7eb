"""Compiled inner loops: word-array bitsets, the subset trie arena, search steps.

A state set over ``n`` states is a row of ``W = ceil(n / 64)`` uint64 words.
A trie is the tuple ``(nodes, ands, ors, store, meta, stack)``:

* ``nodes[i] = (left, right, slot, depth)``, -1 for a missing child, and
  ``slot >= 0`` only on nodes holding a stored set ``store[slot]``;
* ``ands[i]`` / ``ors[i]`` bound the intersection / union of the sets below;
* ``meta = (node_count, slot_count, visits)``;
* ``stack`` is scratch space for the depth-first queries.

Node 0 is the root, an internal node at depth 0.  Arrays grow by doubling, so
every kernel that inserts returns the (possibly new) tuple.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
ONE = np.uint64(1)
ZERO = np.uint64(0)
ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
BYTE = np.uint64(0xFF)

INSERTED = 0
REPLACED = 1
SUBSUMED = 2

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _pop64(x):
    x = x - ((x >> ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True)
def popcounts(sets):
    m, w = sets.shape
    out = np.zeros(m, np.int64)
    for i in range(m):
        c = 0
        for j in range(w):
            c += np.int64(_pop64(sets[i, j]))
        out[i] = c
    return out


@njit(cache=True, inline="always")
def _bit(s, q):
    return (s[q >> 6] >> np.uint64(q & 63)) & ONE


@njit(cache=True, inline="always")
def _is_subset(x, s):
    for j in range(x.shape[0]):
        if x[j] & ~s[j]:
            return False
    return True


@njit(cache=True, inline="always")
def _is_empty(s):
    for j in range(s.shape[0]):
        if s[j]:
            return False
    return True


@njit(cache=True, inline="always")
def _is_singleton(s):
    c = 0
    for j in range(s.shape[0]):
        c += np.int64(_pop64(s[j]))
    return c == 1


@njit(cache=True)
def chunk_tables(targets):
    """``targets[a, q]`` is the word row contributed by state ``q`` under letter ``a``.

    Returns ``tab[a, c, b]``: the union of targets over the states encoded by
    byte value ``b`` in byte ``c`` of a set.
    """
    k, n, w = targets.shape
    nchunks = (n + 7) // 8
    tab = np.zeros((k, nchunks, 256, w), np.uint64)
    for a in range(k):
        for c in range(nchunks):
            for b in range(1, 256):
                low = b & -b
                bit = 0
                while (low >> bit) != 1:
                    bit += 1
                q = c * 8 + bit
                rest = b ^ low
                for j in range(w):
                    tab[a, c, b, j] = tab[a, c, rest, j]
                if q < n:
                    for j in range(w):
                        tab[a, c, b, j] |= targets[a, q, j]
    return tab


@njit(cache=True, inline="always")
def _map_into(tab, a, s, out):
    w = out.shape[0]
    for j in range(w):
        out[j] = ZERO
    nchunks = tab.shape[1]
    for c in range(nchunks):
        byte = (s[c >> 3] >> np.uint64((c & 7) * 8)) & BYTE
        if byte:
            row = tab[a, c, np.intp(byte)]
            for j in range(w):
                out[j] |= row[j]


@njit(cache=True)
def map_sets(tab, a, sets):
    out = np.empty_like(sets)
    for i in range(sets.shape[0]):
        _map_into(tab, a, sets[i], out[i])
    return out


# --- trie arena -----------------------------------------------------------


@njit(cache=True)
def trie_new(w, cap):
    cap = max(cap, 4)
    nodes = np.full((cap, 4), -1, np.int64)
    nodes[0, 3] = 0
    ands = np.empty((cap, w), np.uint64)
    ors = np.empty((cap, w), np.uint64)
    ands[0, :] = ALL
    ors[0, :] = ZERO
    store = np.empty((cap, w), np.uint64)
    meta = np.zeros(3, np.int64)
    meta[0] = 1
    stack = np.empty(64 * w + 8, np.int64)
    return (nodes, ands, ors, store, meta, stack)


@njit(cache=True)
def _reserve(trie, extra):
    nodes, ands, ors, store, meta, stack = trie
    need = meta[0] + extra
    if need > nodes.shape[0]:
        cap = max(need, 2 * nodes.shape[0])
        w = ands.shape[1]
        n2 = np.full((cap, 4), -1, np.int64)
        n2[: meta[0]] = nodes[: meta[0]]
        a2 = np.empty((cap, w), np.uint64)
        a2[: meta[0]] = ands[: meta[0]]
        o2 = np.empty((cap, w), np.uint64)
        o2[: meta[0]] = ors[: meta[0]]
        nodes, ands, ors = n2, a2, o2
    if meta[1] + 1 > store.shape[0]:
        s2 = np.empty((2 * store.shape[0], store.shape[1]), np.uint64)
        s2[: meta[1]] = store[: meta[1]]
        store = s2
    return (nodes, ands, ors, store, meta, stack)


@njit(cache=True, inline="always")
def _new_node(nodes, ands, ors, meta, depth):
    i = meta[0]
    meta[0] += 1
    nodes[i, 0] = -1
    nodes[i, 1] = -1
    nodes[i, 2] = -1
    nodes[i, 3] = depth
    return i


@njit(cache=True, inline="always")
def _new_leaf(nodes, ands, ors, store, meta, depth, s, slot):
    i = _new_node(nodes, ands, ors, meta, depth)
    if slot < 0:
        slot = meta[1]
        meta[1] += 1
    nodes[i, 2] = slot
    for j in range(s.shape[0]):
        store[slot, j] = s[j]
        ands[i, j] = s[j]
        ors[i, j] = s[j]
    return i


@njit(cache=True)
def trie_insert(trie, s, minimal):
    """Insert ``s``; returns the trie and INSERTED / REPLACED / SUBSUMED.

    A comparable set stored on ``s``'s own path is either kept (SUBSUMED) or
    overwritten (REPLACED), depending on which of the two the trie keeps.
    """
    w = s.shape[0]
    trie = _reserve(trie, 64 * w + 4)
    nodes, ands, ors, store, meta, stack = trie
    node = 0
    while True:
        slot = nodes[node, 2]
        if slot >= 0:
            x = store[slot]
            x_in_s = _is_subset(x, s)
            s_in_x = _is_subset(s, x)
            if (minimal and x_in_s) or (not minimal and s_in_x):
                return trie, SUBSUMED
            if x_in_s or s_in_x:
                for j in range(w):
                    store[slot, j] = s[j]
                    ands[node, j] = s[j]
                    ors[node, j] = s[j]
                return trie, REPLACED
            # push the stored set down until the two paths part
            depth = nodes[node, 3]
            nodes[node, 2] = -1
            for j in range(w):
                ands[node, j] = x[j] & s[j]
                ors[node, j] = x[j] | s[j]
            while True:
                bx = _bit(x, depth)
                bs = _bit(s, depth)
                if bx != bs:
                    # x keeps its slot; copy x first since the row is reused
                    lx = _new_leaf(nodes, ands, ors, store, meta, depth + 1, store[slot].copy(), slot)
                    ls = _new_leaf(nodes, ands, ors, store, meta, depth + 1, s, -1)
                    if bs:
                        nodes[node, 0] = lx
                        nodes[node, 1] = ls
                    else:
                        nodes[node, 0] = ls
                        nodes[node, 1] = lx
                    return trie, INSERTED
                child = _new_node(nodes, ands, ors, meta, depth + 1)
                for j in range(w):
                    ands[child, j] = ands[node, j]
                    ors[child, j] = ors[node, j]
                nodes[node, 1 if bs else 0] = child
                node = child
                depth += 1
        depth = nodes[node, 3]
        # internal summaries only widen, which keeps pruning sound
        for j in range(w):
            ands[node, j] &= s[j]
            ors[node, j] |= s[j]
        side = 1 if _bit(s, depth) else 0
        child = nodes[node, side]
        if child < 0:
            leaf = _new_leaf(nodes, ands, ors, store, meta, depth + 1, s, -1)
            nodes[node, side] = leaf
            return trie, INSERTED
        node = child


@njit(cache=True)
def trie_find_subset(trie, s):
    """Slot of some stored set contained in ``s``, or -1."""
    nodes, ands, ors, store, meta, stack = trie
    if meta[1] == 0:
        return -1
    w = s.shape[0]
    sp = 1
    stack[0] = 0
    visits = 0
    found = -1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        visits += 1
        skip = False
        for j in range(w):
            if ands[node, j] & ~s[j]:
                skip = True
                break
        if skip:
            continue
        if nodes[node, 2] >= 0:
            found = nodes[node, 2]
            break
        # sets on the right contain the branching state
        if _bit(s, nodes[node, 3]):
            c = nodes[node, 1]
            if c >= 0:
                stack[sp] = c
                sp += 1
        c = nodes[node, 0]
        if c >= 0:
            stack[sp] = c
            sp += 1
    meta[2] += visits
    return found


@njit(cache=True)
def trie_find_superset(trie, s):
    """Slot of some stored set containing ``s``, or -1."""
    nodes, ands, ors, store, meta, stack = trie
    if meta[1] == 0:
        return -1
    w = s.shape[0]
    sp = 1
    stack[0] = 0
    visits = 0
    found = -1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        visits += 1
        skip = False
        for j in range(w):
            if s[j] & ~ors[node, j]:
                skip = True
                break
        if skip:
            continue
        if nodes[node, 2] >= 0:
            found = nodes[node, 2]
            break
        # sets on the left lack the branching state
        if not _bit(s, nodes[node, 3]):
            c = nodes[node, 0]
            if c >= 0:
                stack[sp] = c
                sp += 1
        c = nodes[node, 1]
        if c >= 0:
            stack[sp] = c
            sp += 1
    meta[2] += visits
    return found


@njit(cache=True)
def trie_find(trie, s, minimal):
    if minimal:
        return trie_find_subset(trie, s)
    return trie_find_superset(trie, s)


@njit(cache=True)
def trie_contains(trie, s):
    nodes, ands, ors, store, meta, stack = trie
    if meta[1] == 0:
        return False
    node = 0
    while node >= 0:
        slot = nodes[node, 2]
        if slot >= 0:
            for j in range(s.shape[0]):
                if store[slot, j] != s[j]:
                    return False
            return True
        node = nodes[node, 1 if _bit(s, nodes[node, 3]) else 0]
    return False


@njit(cache=True)
def trie_from_ordered(sets, order, minimal):
    """Fresh trie with each set of ``sets[order]`` that has no comparable
    predecessor; returns the trie and the accepted positions (in ``order``)."""
    w = sets.shape[1]
    trie = trie_new(w, 2 * len(order) + 4)
    kept = np.empty(len(order), np.int64)
    cnt = 0
    for i in order:
        if trie_find(trie, sets[i], minimal) < 0:
            trie, _ = trie_insert(trie, sets[i], minimal)
            kept[cnt] = i
            cnt += 1
    trie[4][2] = 0
    return trie, kept[:cnt]


@njit(cache=True)
def antichain(sets, minimal):
    """Survivor positions (ascending) when ``sets`` is reduced back-to-front."""
    order = np.arange(sets.shape[0] - 1, -1, -1)
    trie, kept = trie_from_ordered(sets, order, minimal)
    return kept[::-1].copy(), trie


@njit(cache=True)
def expand(sets, tab, visited, minimal):
    """Every image (``tab`` of images) or preimage of every set under every letter.

    Empty results and results dominated by a visited set are skipped; the rest
    are inserted into ``visited`` and returned with parent index and letter.
    """
    m, w = sets.shape
    k = tab.shape[0]
    out = np.empty((m * k, w), np.uint64)
    parents = np.empty(m * k, np.int64)
    letters = np.empty(m * k, np.int64)
    cnt = 0
    for i in range(m):
        for a in range(k):
            t = out[cnt]
            _map_into(tab, a, sets[i], t)
            if _is_empty(t):
                continue
            if trie_find(visited, t, minimal) >= 0:
                continue
            visited, _ = trie_insert(visited, t, minimal)
            parents[cnt] = i
            letters[cnt] = a
            cnt += 1
    return visited, out[:cnt], parents[:cnt], letters[:cnt]


@njit(cache=True)
def expand_all(sets, tab):
    """Images of every set under every letter, without any filtering."""
    m, w = sets.shape
    k = tab.shape[0]
    out = np.empty((m * k, w), np.uint64)
    parents = np.empty(m * k, np.int64)
    letters = np.empty(m * k, np.int64)
    cnt = 0
    for i in range(m):
        for a in range(k):
            _map_into(tab, a, sets[i], out[cnt])
            parents[cnt] = i
            letters[cnt] = a
            cnt += 1
    return out, parents, letters


@njit(cache=True)
def meet(backward, forward_trie):
    """First backward row containing a set of ``forward_trie``: (row, slot)."""
    for i in range(backward.shape[0]):
        slot = trie_find_subset(forward_trie, backward[i])
        if slot >= 0:
            return i, slot
    return -1, -1


@njit(cache=True)
def first_singleton(sets):
    for i in range(sets.shape[0]):
        if _is_singleton(sets[i]):
            return i
    return -1


@njit(cache=True)
def find_row(sets, s):
    for i in range(sets.shape[0]):
        same = True
        for j in range(s.shape[0]):
            if sets[i, j] != s[j]:
                same = False
                break
        if same:
            return i
    return -1
