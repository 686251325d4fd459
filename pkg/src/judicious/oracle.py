"""Exhaustive reference solvers used as ground truth in tests.

Every function checks the defining conditions directly over all partitions
or colorings, guarded by a size gate.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .abcbjb import V1, AbcInstance, ColorVector, translate
from .decomposition import TreeDecomposition
from .errors import GateExceeded, InputError
from .graph import MultiGraph, find_bipartition, is_unbreakable_function
from .pipeline import BjbInstance, SolveAnswer
from .tables import AJPTable, layout

PARTITION_LIMIT = 20
COLORING_LIMIT = 2_000_000


def _inside_counts(g: MultiGraph, part1: set[int]) -> tuple[int, int]:
    e1 = e2 = 0
    for (u, v), m in g.multiplicities().items():
        if u in part1 and v in part1:
            e1 += m
        elif u not in part1 and v not in part1:
            e2 += m
    return e1, e2


def brute_force_bjb(inst: BjbInstance, order: str = "mask", limit: int = PARTITION_LIMIT) -> SolveAnswer:
    """First witness in the chosen enumeration order.

    ``order="mask"`` walks all ``2^n`` subsets by increasing bitmask;
    ``order="combinations"`` walks only the ``mu``-subsets in lexicographic
    order.  Both must agree on the answer.
    """
    g = inst.g
    if g.n > limit:
        raise GateExceeded(f"{g.n} vertices exceed the partition limit {limit}")
    everything = frozenset(g.vertices())
    if order == "mask":
        candidates = (
            {v for v in g.vertices() if mask >> v & 1} for mask in range(1 << g.n)
        )
    elif order == "combinations":
        candidates = (set(c) for c in itertools.combinations(g.vertices(), inst.mu))
    else:
        raise InputError(f"unknown enumeration order {order!r}")
    for part1 in candidates:
        if len(part1) != inst.mu:
            continue
        e1, e2 = _inside_counts(g, part1)
        if e1 <= inst.k1 and e2 <= inst.k2:
            return SolveAnswer(True, (frozenset(part1), everything - frozenset(part1)))
    return SolveAnswer(False)


def brute_force_jb(g: MultiGraph, k1: int, k2: int, limit: int = PARTITION_LIMIT) -> SolveAnswer:
    for mu in range(g.n + 1):
        ans = brute_force_bjb(BjbInstance(g, mu, k1, k2), limit=limit)
        if ans.yes:
            return ans
    return SolveAnswer(False)


def brute_force_oct(g: MultiGraph, k: int, limit: int = PARTITION_LIMIT) -> frozenset[int] | None:
    """First smallest vertex set of size at most ``k`` whose removal leaves a bipartite graph."""
    if g.n > limit:
        raise GateExceeded(f"{g.n} vertices exceed the partition limit {limit}")
    for size in range(min(k, g.n) + 1):
        for S in itertools.combinations(g.vertices(), size):
            rest = [v for v in g.vertices() if v not in S]
            sub, _ = g.induced(rest)
            if find_bipartition(sub) is not None:
                return frozenset(S)
    return None


def brute_force_abcbjb(inst: AbcInstance, limit: int = PARTITION_LIMIT) -> AJPTable:
    """Full table by checking every partition against every cell."""
    g = inst.g
    if g.n > limit:
        raise GateExceeded(f"{g.n} vertices exceed the partition limit {limit}")
    lay = layout(g.n, inst.k1, inst.k2)
    bits = 0
    for mask in range(1 << g.n):
        part1 = {v for v in g.vertices() if mask >> v & 1}
        if not inst.A <= part1 or inst.B & part1:
            continue
        e1, e2 = _inside_counts(g, part1)
        for l1 in range(inst.k1 + 1):
            for l2 in range(inst.k2 + 1):
                if e1 <= l1 and e2 <= l2:
                    bits |= lay.bit(len(part1), l1, l2)
    return AJPTable(lay, bits)


def brute_force_y_table(
    inst: AbcInstance, td: TreeDecomposition, t: int, ups: Sequence[int], v: ColorVector, limit: int = COLORING_LIMIT
) -> AJPTable:
    """All cells of the node table for adhesion coloring ``ups`` and vector ``v``.

    Every coloring of the subtree vertices extending ``ups`` is checked against
    the four conditions: exact ``V1`` count, forced vertices on their sides,
    intra-side edge budgets, and cross-color edges coinciding with same-side
    edges.  Non-unbreakable adhesion colorings give an all-zero table.
    """
    g, k = inst.g, inst.k
    lay = layout(g.n, inst.k1, inst.k2)
    sigma = sorted(td.sigma(t))
    gamma = sorted(td.gamma(t))
    if len(ups) != len(sigma) or len(v) != k + 1:
        raise InputError("adhesion coloring or color vector has the wrong length")
    if not is_unbreakable_function(tuple(ups), 3 * k * k, k):
        return AJPTable(lay, 0)
    free = [x for x in gamma if x not in set(sigma)]
    if (k + 1) ** len(free) > limit:
        raise GateExceeded(f"{k + 1}^{len(free)} extensions exceed the limit {limit}")
    gset = set(gamma)
    edges = [(a, b, m) for (a, b), m in g.multiplicities().items() if a in gset and b in gset]
    bits = 0
    for extra in itertools.product(range(k + 1), repeat=len(free)):
        col = dict(zip(sigma, ups))
        col.update(zip(free, extra))
        sides = translate(col, tuple(v), inst.bipartition)
        mu = sum(1 for x in gamma if sides[x] == V1)
        if any(sides[x] != V1 for x in inst.A & gset) or any(sides[x] == V1 for x in inst.B & gset):
            continue
        e1 = sum(m for a, b, m in edges if sides[a] == sides[b] == V1)
        e2 = sum(m for a, b, m in edges if sides[a] == sides[b] != V1)
        cross = {(a, b) for a, b, _ in edges if col[a] != col[b]}
        same_side = {(a, b) for a, b, _ in edges if sides[a] == sides[b]}
        if cross != same_side:
            continue
        for l1 in range(inst.k1 + 1):
            for l2 in range(inst.k2 + 1):
                if e1 <= l1 and e2 <= l2:
                    bits |= lay.bit(mu, l1, l2)
    return AJPTable(lay, bits)


def brute_force_y(
    inst: AbcInstance, td: TreeDecomposition, t: int, ups: Sequence[int], v: ColorVector, mu: int, l1: int, l2: int
) -> bool:
    """One bit of the node table; see :func:`brute_force_y_table`."""
    table = brute_force_y_table(inst, td, t, ups, v)
    lay = table.layout
    if not (0 <= mu <= lay.b and 0 <= l1 <= lay.k1 and 0 <= l2 <= lay.k2):
        raise InputError(f"cell {(mu, l1, l2)} is outside the table")
    return table[mu, l1, l2]
