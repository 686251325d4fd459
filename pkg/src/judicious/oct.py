"""Odd cycle transversal by iterative compression.

The compression step guesses, for the current transversal ``W`` of size
``k + 1``, which of its vertices are deleted and on which side each kept one
lies (``3^(k+1)`` guesses).  What remains is a minimum vertex cut in the
bipartite graph ``G - W`` between vertices that must keep their side and
vertices that must flip, solved with unit-capacity augmenting paths.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .graph import MultiGraph, find_bipartition


@dataclass(frozen=True)
class OctAnswer:
    transversal: frozenset[int] | None

    @property
    def found(self) -> bool:
        return self.transversal is not None


def _min_vertex_cut(adj: dict[int, set[int]], sources: set[int], sinks: set[int], budget: int) -> set[int] | None:
    """Smallest vertex set (terminals included) hitting every source-sink path.

    Returns ``None`` when more than ``budget`` vertices are needed.
    """
    if not sources or not sinks:
        return set()
    # Node 2v is the entry copy of v, 2v+1 the exit copy; the internal arc has capacity 1.
    S, T = -1, -2
    cap: dict[tuple[int, int], int] = {}
    out: dict[int, list[int]] = {}

    def arc(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            out.setdefault(a, []).append(b)
            out.setdefault(b, []).append(a)
            cap[(a, b)] = 0
            cap.setdefault((b, a), 0)
        cap[(a, b)] += c

    big = budget + 2
    for v in adj:
        arc(2 * v, 2 * v + 1, 1)
        for w in adj[v]:
            arc(2 * v + 1, 2 * w, big)
    for v in sources:
        arc(S, 2 * v, big)
    for v in sinks:
        arc(2 * v + 1, T, big)

    flow = 0
    while True:
        prev = {S: None}
        dq = deque([S])
        while dq and T not in prev:
            a = dq.popleft()
            for b in out.get(a, ()):
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    dq.append(b)
        if T not in prev:
            break
        b = T
        while prev[b] is not None:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
        if flow > budget:
            return None
    reach = set(prev)
    return {v for v in adj if 2 * v in reach and 2 * v + 1 not in reach}


def _compress(g: MultiGraph, active: list[int], W: list[int], k: int) -> set[int] | None:
    """Given an OCT ``W`` of ``g[active]``, find one of size at most ``k``."""
    Wset = set(W)
    rest = [v for v in active if v not in Wset]
    rest_set = set(rest)
    sub, ids = g.induced(rest)
    bip = find_bipartition(sub)
    base_side = {ids[i]: (0 if i in bip.P else 1) for i in range(len(ids))}
    adj = {v: {w for w in g.neighbors(v) if w in rest_set} for v in rest}

    for labels in itertools.product((0, 1, 2), repeat=len(W)):
        deleted = [w for w, lab in zip(W, labels) if lab == 2]
        if len(deleted) > k:
            continue
        side = {w: lab for w, lab in zip(W, labels) if lab != 2}
        if any(u in side and side.get(u) == side[w] for w in side for u in g.neighbors(w)):
            continue
        forced: set[int] = set()
        keep, flip = set(), set()
        for v in rest:
            need = {1 - side[w] for w in g.neighbors(v) if w in side}
            if len(need) == 2:
                forced.add(v)
            elif need:
                (target,) = need
                (keep if target == base_side[v] else flip).add(v)
        budget = k - len(deleted) - len(forced)
        if budget < 0:
            continue
        sub_adj = {v: adj[v] - forced for v in rest if v not in forced}
        cut = _min_vertex_cut(sub_adj, keep - forced, flip - forced, budget)
        if cut is not None:
            return set(deleted) | forced | cut
    return None


def _oct_at_most(g: MultiGraph, k: int) -> set[int] | None:
    order = list(g.vertices())
    current: set[int] = set()
    active: list[int] = []
    for v in order:
        active.append(v)
        current.add(v)
        if len(current) <= k:
            continue
        W = sorted(current)
        nxt = _compress(g, active, W, k)
        if nxt is None:
            return None
        current = nxt
    return current


def solve_oct(g: MultiGraph, k: int) -> OctAnswer:
    """Smallest odd cycle transversal of size at most ``k``, or absent.

    Budgets are tried in increasing order, so the returned set is minimum.
    """
    if k < 0:
        return OctAnswer(None)
    for budget in range(k + 1):
        found = _oct_at_most(g, budget)
        if found is not None:
            return OctAnswer(frozenset(found))
    return OctAnswer(None)
