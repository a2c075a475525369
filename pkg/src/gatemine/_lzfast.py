"""Compiled core of the exhaustive-history factor count.

The parser consumes the sequence left to right; each phrase is the shortest
prefix of the remainder that has never started before the current position,
and the final phrase may be a pure copy.  Equivalently, a phrase ends at the
first index where the walked substring's earliest occurrence is the current
one, which a suffix automaton answers in amortised O(1): a state's recorded
first-ending position tells us the earliest start of any string it accepts,
and that earliest start is monotone in the walked length.  Build plus walk is
linear in the input.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _factor_count_impl(s):  # pragma: no cover - exercised via the jitted wrapper
    n = s.shape[0]
    max_states = 2 * n + 5
    nxt = np.zeros((max_states, 2), dtype=np.int32)
    link = np.zeros(max_states, dtype=np.int32)
    length = np.zeros(max_states, dtype=np.int32)
    first_end = np.zeros(max_states, dtype=np.int32)
    size = 2  # state 1 is the root; 0 means "no transition"
    last = 1
    for i in range(n):
        ch = s[i]
        cur = size
        size += 1
        length[cur] = length[last] + 1
        first_end[cur] = i
        p = last
        while p != 0 and nxt[p, ch] == 0:
            nxt[p, ch] = cur
            p = link[p]
        if p == 0:
            link[cur] = 1
        else:
            q = nxt[p, ch]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = size
                size += 1
                length[clone] = length[p] + 1
                link[clone] = link[q]
                nxt[clone, 0] = nxt[q, 0]
                nxt[clone, 1] = nxt[q, 1]
                first_end[clone] = first_end[q]
                while p != 0 and nxt[p, ch] == q:
                    nxt[p, ch] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur

    count = 0
    state = 1
    for j in range(n):
        state = nxt[state, s[j]]
        if first_end[state] == j:
            # the walked phrase first occurs right here: phrase boundary
            count += 1
            state = 1
    if state != 1:
        count += 1  # trailing copy phrase
    return count


if njit is not None:
    lz76_factor_count = njit(cache=True)(_factor_count_impl)
else:  # pragma: no cover
    lz76_factor_count = None
