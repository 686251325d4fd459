"""Top-level solvers for balanced judicious bipartition.

``solve_bjb`` finds a small odd cycle transversal ``S``, guesses which part
of ``S`` lands in ``V1`` and replaces ``S`` by four gadget vertices, which
leaves a bipartite instance with forced vertices.  That instance is solved
component by component with the full-table solver and the tables are merged
by a sumset DP.  ``solve_jb`` drops the size constraint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .abcbjb import AbcInstance, AbcSolver
from .decomposition import TdProvider, checked_split_decomposition
from .errors import InputError
from .graph import Bipartition, MultiGraph, connected_components, find_bipartition, is_bipartition
from .hp import HPMemo, backtrack_splits
from .oct import solve_oct
from .tables import AJPTable, layout, relayout


@dataclass(frozen=True)
class BjbInstance:
    g: MultiGraph
    mu: int
    k1: int
    k2: int

    def __post_init__(self) -> None:
        if min(self.mu, self.k1, self.k2) < 0:
            raise InputError("mu and budgets must be nonnegative")
        if self.mu > self.g.n:
            raise InputError(f"mu = {self.mu} exceeds the number of vertices {self.g.n}")


@dataclass(frozen=True)
class AbBjbInstance:
    g: MultiGraph
    bipartition: Bipartition
    A: frozenset[int]
    B: frozenset[int]
    mu: int
    k1: int
    k2: int

    def __post_init__(self) -> None:
        if self.A & self.B:
            raise InputError("A and B must be disjoint")
        if min(self.k1, self.k2) < 0:
            raise InputError("budgets must be nonnegative")
        if not is_bipartition(self.g, self.bipartition.P, self.bipartition.Q):
            raise InputError("the given sides are not a bipartition of the graph")


@dataclass
class SolveAnswer:
    yes: bool
    witness: tuple[frozenset[int], frozenset[int]] | None = None
    stats: dict = field(default_factory=dict)


def verify_partition(
    g: MultiGraph,
    V1: Iterable[int],
    V2: Iterable[int],
    mu: int | None,
    k1: int,
    k2: int,
    A: Iterable[int] = (),
    B: Iterable[int] = (),
) -> bool:
    """Independent check of a claimed partition (``mu=None`` skips the size test)."""
    V1, V2 = set(V1), set(V2)
    if V1 & V2 or V1 | V2 != set(g.vertices()):
        return False
    if mu is not None and len(V1) != mu:
        return False
    if not set(A) <= V1 or not set(B) <= V2:
        return False
    inside1 = sum(m for (u, v), m in g.multiplicities().items() if u in V1 and v in V1)
    inside2 = sum(m for (u, v), m in g.multiplicities().items() if u in V2 and v in V2)
    return inside1 <= k1 and inside2 <= k2


# ----------------------------------------------------------------------------
# Gadget


@dataclass(frozen=True)
class Gadget:
    """Bipartite instance replacing a transversal ``S`` with guessed ``V1`` part ``F``.

    Vertices ``0..r-1`` of ``graph`` are ``original`` (the vertices outside
    ``S``, sorted); ``w, x, y, z`` follow.
    """

    graph: MultiGraph
    original: tuple[int, ...]
    w: int
    x: int
    y: int
    z: int
    bipartition: Bipartition
    l1: int
    l2: int


def build_gadget(g: MultiGraph, S: Iterable[int], F: Iterable[int], pq: Bipartition, per_edge: bool = True) -> Gadget:
    """Gadget graph for transversal ``S`` and guess ``F``.

    ``w`` (resp. ``x``) is joined to each ``P`` (resp. ``Q``) vertex with a
    neighbour in ``F``; ``z`` and ``y`` likewise for ``S - F``.  With
    ``per_edge`` every edge into ``F`` (or ``S - F``) yields its own gadget
    edge, so intra-side edge counts carry over exactly; otherwise one edge per
    qualifying vertex is added.
    """
    S, F = set(S), set(F)
    if not F <= S:
        raise InputError("F must be a subset of S")
    rest = [v for v in g.vertices() if v not in S]
    if set(pq.P) | set(pq.Q) != set(rest):
        raise InputError("the bipartition must cover exactly the vertices outside S")
    local = {v: i for i, v in enumerate(rest)}
    r = len(rest)
    w, x, y, z = r, r + 1, r + 2, r + 3
    edges = []
    for (u, v), m in g.multiplicities().items():
        if u in local and v in local:
            edges.extend([(local[u], local[v])] * m)
    for u in rest:
        for s in g.neighbors(u):
            if s not in S:
                continue
            count = g.multiplicity(u, s) if per_edge else 1
            if s in F:
                hub = w if u in pq.P else x
            else:
                hub = z if u in pq.P else y
            edges.extend([(hub, local[u])] * count)
    if not per_edge:
        edges = _dedupe_hub_edges(edges, r)
    gf = MultiGraph(r + 4, edges)
    P = frozenset(local[v] for v in pq.P) | {x, y}
    Q = frozenset(local[v] for v in pq.Q) | {w, z}
    return Gadget(gf, tuple(rest), w, x, y, z, Bipartition(P, Q), g.count_edges_within(F), g.count_edges_within(S - F))


def _dedupe_hub_edges(edges, r):
    out, seen = [], set()
    for e in edges:
        if max(e) >= r:
            if e in seen:
                continue
            seen.add(e)
        out.append(e)
    return out


# ----------------------------------------------------------------------------
# Component tables


class TableCache:
    """Solved component tables keyed by their relabelled instance.

    Budgets are not part of the key: a table solved with larger budgets,
    cut down to the requested ones, is the table for those budgets.  A miss
    solves with budgets at least ``floor`` so that later requests with other
    small budgets are served by slicing.  Painting instances are answered
    through ``hp_memo``, which may be shared between caches.
    """

    def __init__(self, floor: tuple[int, int] = (0, 0), hp_memo: HPMemo | None = None):
        self._solvers: dict[tuple, AbcSolver] = {}
        self.floor = floor
        self.hp_memo = hp_memo if hp_memo is not None else HPMemo()
        self.hits = 0
        self.misses = 0

    def solver(self, inst: AbcInstance, td_provider: TdProvider) -> AbcSolver:
        key = (
            inst.g.n,
            tuple(sorted(inst.g.multiplicities().items())),
            tuple(sorted(inst.bipartition.P)),
            tuple(sorted(inst.A)),
            tuple(sorted(inst.B)),
            td_provider,
        )
        got = self._solvers.get(key)
        if got is not None and got.inst.k1 >= inst.k1 and got.inst.k2 >= inst.k2:
            self.hits += 1
            return got
        self.misses += 1
        k1 = max(inst.k1, self.floor[0], got.inst.k1 if got else 0)
        k2 = max(inst.k2, self.floor[1], got.inst.k2 if got else 0)
        wide = AbcInstance(inst.g, inst.bipartition, inst.A, inst.B, k1, k2)
        got = AbcSolver(wide, td_provider(wide.g, wide.k), hp_memo=self.hp_memo)
        got.run()
        self._solvers[key] = got
        return got

    def clear(self) -> None:
        self._solvers.clear()


DEFAULT_CACHE = TableCache()


def _component_instances(inst: AbBjbInstance) -> list[tuple[list[int], AbcInstance]]:
    out = []
    for comp in connected_components(inst.g):
        sub, ids = inst.g.induced(comp)
        local = {v: i for i, v in enumerate(ids)}
        P = frozenset(local[v] for v in ids if v in inst.bipartition.P)
        Q = frozenset(local[v] for v in ids if v not in inst.bipartition.P)
        A = frozenset(local[v] for v in inst.A if v in local)
        B = frozenset(local[v] for v in inst.B if v in local)
        out.append((ids, AbcInstance(sub, Bipartition(P, Q), A, B, inst.k1, inst.k2)))
    return out


def solve_abbjb(
    inst: AbBjbInstance,
    td_provider: TdProvider = checked_split_decomposition,
    cache: TableCache | None = None,
    want_witness: bool = True,
) -> SolveAnswer:
    """Decide the instance by merging per-component tables."""
    cache = cache if cache is not None else DEFAULT_CACHE
    n = inst.g.n
    if not 0 <= inst.mu <= n:
        return SolveAnswer(False)
    lay = layout(n, inst.k1, inst.k2)
    parts = _component_instances(inst)
    solvers = [cache.solver(ci, td_provider) for _, ci in parts]
    tables = [relayout(s.table.bits, s.lay, lay) for s in solvers]
    acc = lay.bit(0, 0, 0)
    for t in tables:
        acc = lay.conv(acc, t)
        if not acc:
            break
    target = (inst.mu, inst.k1, inst.k2)
    if not acc & lay.bit(*target):
        return SolveAnswer(False)
    if not want_witness:
        return SolveAnswer(True)
    cells = backtrack_splits(lay, tables, target)
    part1: set[int] = set()
    for (ids, _), solver, cell in zip(parts, solvers, cells):
        local1, _ = solver.witness(*cell)
        part1.update(ids[i] for i in local1)
    V1 = frozenset(part1)
    V2 = frozenset(inst.g.vertices()) - V1
    if not verify_partition(inst.g, V1, V2, inst.mu, inst.k1, inst.k2, inst.A, inst.B):
        raise AssertionError("reconstructed witness fails verification")
    return SolveAnswer(True, (V1, V2))


# ----------------------------------------------------------------------------
# BJB and JB


def _branches(g: MultiGraph, k1: int, k2: int):
    """Transversal and the feasible guesses ``F`` with their residual budgets."""
    oct_answer = solve_oct(g, k1 + k2)
    if not oct_answer.found:
        return None, []
    S = sorted(oct_answer.transversal)
    rest = [v for v in g.vertices() if v not in oct_answer.transversal]
    sub, ids = g.induced(rest)
    bip = find_bipartition(sub)
    pq = Bipartition(frozenset(ids[i] for i in bip.P), frozenset(ids[i] for i in bip.Q))
    out = []
    for size in range(len(S) + 1):
        for F in itertools.combinations(S, size):
            l1 = g.count_edges_within(F)
            l2 = g.count_edges_within(set(S) - set(F))
            if l1 > k1 or l2 > k2:
                continue
            out.append((frozenset(F), build_gadget(g, S, F, pq)))
    return frozenset(S), out


def solve_bjb(
    inst: BjbInstance, td_provider: TdProvider = checked_split_decomposition, cache: TableCache | None = None
) -> SolveAnswer:
    """Decide whether ``g`` has a partition with ``|V1| = mu`` and at most ``k_i`` edges in ``V_i``."""
    g, k1, k2 = inst.g, inst.k1, inst.k2
    S, branches = _branches(g, k1, k2)
    stats = {"transversal": None if S is None else sorted(S), "branches": len(branches)}
    if S is None:
        return SolveAnswer(False, stats=stats)
    for F, gadget in branches:
        sub = AbBjbInstance(
            gadget.graph,
            gadget.bipartition,
            frozenset({gadget.w, gadget.x}),
            frozenset({gadget.y, gadget.z}),
            inst.mu - len(F) + 2,
            k1 - gadget.l1,
            k2 - gadget.l2,
        )
        ans = solve_abbjb(sub, td_provider, cache)
        if ans.yes:
            V1p, _ = ans.witness
            V1 = frozenset(gadget.original[i] for i in V1p if i < len(gadget.original)) | F
            V2 = frozenset(g.vertices()) - V1
            if not verify_partition(g, V1, V2, inst.mu, k1, k2):
                raise AssertionError("mapped-back witness fails verification")
            stats["F"] = sorted(F)
            return SolveAnswer(True, (V1, V2), stats)
    return SolveAnswer(False, stats=stats)


def solve_jb(
    g: MultiGraph, k1: int, k2: int, td_provider: TdProvider = checked_split_decomposition, cache: TableCache | None = None
) -> SolveAnswer:
    """Decide whether some partition has at most ``k_i`` edges inside ``V_i``."""
    for mu in range(g.n + 1):
        ans = solve_bjb(BjbInstance(g, mu, k1, k2), td_provider, cache)
        if ans.yes:
            ans.stats["mu"] = mu
            return ans
    return SolveAnswer(False)
