"""Hypergraph painting: model, brute-force evaluator and the favorable-instance solver.

An instance holds a hypergraph, budgets ``k1, k2`` (``k = k1 + k2``, colors
``0..k``), a size bound ``b`` and one painting function per hyperedge.  A
painting function maps a coloring of its hyperedge (aligned with the sorted
vertex tuple) to the set of ``(mu, l1, l2)`` cells it accepts, held as a
bitset in the layout of :mod:`judicious.tables`.  The answer table has a 1 at
``(mu, l1, l2)`` when some coloring of all vertices and some split of the cell
over the hyperedges (``mu`` exactly, budgets with slack) is accepted by every
hyperedge.

The favorable solver:

1. lists the ``(3k^2, k)``-unbreakable colorings of every hyperedge;
2. walks a deterministic family of assignments that pin some hyperedges to
   one listed coloring (``0`` = unpinned);
3. normalizes each assignment with three rewriting rules;
4. groups vertices into labelled components, evaluates each group under its
   few admissible colorings with a split DP, and combines the groups;
5. ORs over the family, once for every choice of majority color.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from operator import itemgetter
from typing import Callable, Iterator, Sequence

from .derand import all_functions, cover_family, perfect_family
from .errors import GateExceeded, InputError
from .graph import (
    DisjointSets,
    Hypergraph,
    coloring_code,
    coloring_from_code,
    enumerate_unbreakable_functions,
    hypergraph_spanning_forest,
    is_unbreakable_function,
)
from .tables import AJPTable, Layout, iter_bits, layout

Coloring = tuple[int, ...]
Assignment = tuple[int, ...]
Cell = tuple[int, int, int]

BRUTE_FORCE_LIMIT = 2_000_000
FAMILY_LIMIT = 2_000_000
CHECK_LIMIT = 50_000
FAMILIES = ("paper", "realizable")


class PaintingFunction:
    """Acceptance function of one hyperedge, memoized per coloring.

    Backed by a dense table (one cell bitset per coloring code) or by a
    closure returning the cell bitset of a coloring.
    """

    __slots__ = ("hyperedge", "k", "layout", "_fn", "_memo")

    def __init__(self, hyperedge: Sequence[int], k: int, lay: Layout, mask_fn: Callable[[Coloring], int]):
        self.hyperedge = tuple(hyperedge)
        self.k = k
        self.layout = lay
        self._fn = mask_fn
        self._memo: dict[Coloring, int] = {}

    @classmethod
    def from_table(cls, hyperedge: Sequence[int], k: int, lay: Layout, table: Sequence[int]) -> "PaintingFunction":
        expected = (k + 1) ** len(hyperedge)
        if len(table) != expected:
            raise InputError(f"dense table needs {expected} entries, got {len(table)}")
        table = tuple(t & lay.valid for t in table)
        return cls(hyperedge, k, lay, lambda col: table[coloring_code(col, k)])

    @classmethod
    def from_evaluator(
        cls, hyperedge: Sequence[int], k: int, lay: Layout, fn: Callable[[Coloring, int, int, int], bool]
    ) -> "PaintingFunction":
        def mask(col: Coloring) -> int:
            out = 0
            for mu in range(lay.b + 1):
                for l1 in range(lay.k1 + 1):
                    for l2 in range(lay.k2 + 1):
                        if fn(col, mu, l1, l2):
                            out |= 1 << lay.index(mu, l1, l2)
            return out

        return cls(hyperedge, k, lay, mask)

    def mask(self, coloring: Coloring) -> int:
        got = self._memo.get(coloring)
        if got is None:
            got = self._fn(coloring) & self.layout.valid
            self._memo[coloring] = got
        return got

    def evaluate(self, coloring: Sequence[int], mu: int, l1: int, l2: int) -> bool:
        return bool(self.mask(tuple(coloring)) & self.layout.bit(mu, l1, l2))

    def dense(self) -> list[int]:
        size = len(self.hyperedge)
        return [self.mask(coloring_from_code(c, size, self.k)) for c in range((self.k + 1) ** size)]


@dataclass
class HPInstance:
    k1: int
    k2: int
    b: int
    d: int
    q: int
    h: Hypergraph
    painting: list[PaintingFunction]

    def __post_init__(self) -> None:
        if min(self.k1, self.k2, self.b, self.d, self.q) < 0:
            raise InputError("instance parameters must be nonnegative")
        if len(self.painting) != len(self.h.hyperedges):
            raise InputError("one painting function per hyperedge is required")
        for F, f in zip(self.h.hyperedges, self.painting):
            if len(F) > self.d:
                raise InputError(f"hyperedge {F} is larger than d = {self.d}")
            if f.hyperedge != F or f.k != self.k or f.layout != self.layout:
                raise InputError(f"painting function of {F} does not match the instance")

    @property
    def k(self) -> int:
        return self.k1 + self.k2

    @property
    def layout(self) -> Layout:
        return layout(self.b, self.k1, self.k2)

    def same_as(self, other: "HPInstance") -> bool:
        head = (self.k1, self.k2, self.b, self.d, self.q, self.h)
        if head != (other.k1, other.k2, other.b, other.d, other.q, other.h):
            return False
        return all(f.dense() == g.dense() for f, g in zip(self.painting, other.painting))


def dense_instance(k1: int, k2: int, b: int, d: int, q: int, n: int, hyperedges, tables) -> HPInstance:
    """Instance whose painting functions are given as dense tables of cell bitsets."""
    h = Hypergraph(n, hyperedges)
    lay = layout(b, k1, k2)
    if len(tables) != len(h.hyperedges):
        raise InputError("one dense table per hyperedge is required")
    painting = [PaintingFunction.from_table(F, k1 + k2, lay, t) for F, t in zip(h.hyperedges, tables)]
    return HPInstance(k1, k2, b, d, q, h, painting)


# ----------------------------------------------------------------------------
# Brute force and witness checking


def brute_force_hp(inst: HPInstance, limit: int = BRUTE_FORCE_LIMIT) -> AJPTable:
    """Answer table by enumerating every coloring of the vertices.

    Budget splits for one coloring are combined by a sumset DP over the
    hyperedges, which covers every split without listing them.  A branch
    stops as soon as its partial sumset is empty.
    """
    n, k, lay = inst.h.n, inst.k, inst.layout
    if (k + 1) ** n > limit:
        raise GateExceeded(f"{k + 1}^{n} colorings exceed the brute-force limit {limit}")
    by_last: list[list[int]] = [[] for _ in range(n)]
    for idx, F in enumerate(inst.h.hyperedges):
        by_last[F[-1]].append(idx)
    color = [0] * n

    def rec(v: int, acc: int) -> int:
        if v == n:
            return acc
        out = 0
        for c in range(k + 1):
            color[v] = c
            cur = acc
            for idx in by_last[v]:
                F = inst.h.hyperedges[idx]
                cur = lay.conv(cur, inst.painting[idx].mask(tuple(color[u] for u in F)))
                if not cur:
                    break
            if cur:
                out |= rec(v + 1, cur)
        return out

    return AJPTable(lay, lay.upclose(rec(0, lay.bit(0, 0, 0))))


def hp_accepts(inst: HPInstance, coloring: Sequence[int], splits: Sequence[Cell], cell: Cell) -> bool:
    """Check a claimed witness for ``cell`` directly against the definition."""
    mu, l1, l2 = cell
    if len(coloring) != inst.h.n or len(splits) != len(inst.h.hyperedges):
        return False
    if sum(s[0] for s in splits) != mu or sum(s[1] for s in splits) > l1 or sum(s[2] for s in splits) > l2:
        return False
    return all(
        f.evaluate(tuple(coloring[v] for v in F), *s) for F, f, s in zip(inst.h.hyperedges, inst.painting, splits)
    )


def backtrack_splits(lay: Layout, masks: Sequence[int], target: Cell) -> list[Cell] | None:
    """Cells, one per mask, summing exactly to ``target``; ``None`` if impossible."""
    prefix = [lay.bit(0, 0, 0)]
    for m in masks:
        prefix.append(lay.conv(prefix[-1], m))
    if not prefix[-1] & lay.bit(*target):
        return None
    out: list[Cell] = [(0, 0, 0)] * len(masks)
    cur = target
    for i in range(len(masks) - 1, -1, -1):
        for a in lay.cells(masks[i]):
            rest = (cur[0] - a[0], cur[1] - a[1], cur[2] - a[2])
            if min(rest) >= 0 and prefix[i] & lay.bit(*rest):
                out[i], cur = a, rest
                break
    return out


# ----------------------------------------------------------------------------
# Candidate colorings and the assignment family


def enumerate_candidate_colorings(F: Sequence[int], k: int) -> list[Coloring]:
    """The ``(3k^2, k)``-unbreakable colorings of ``F`` in canonical order."""
    return enumerate_unbreakable_functions(list(F), 3 * k * k, k)


@lru_cache(maxsize=256)
def _candidates_by_size(size: int, k: int) -> tuple[Coloring, ...]:
    return tuple(enumerate_unbreakable_functions(list(range(size)), 3 * k * k, k))


def candidate_lists(inst: HPInstance) -> list[Sequence[Coloring]]:
    """Candidate list of every hyperedge; lists depend only on the hyperedge size."""
    return [_candidates_by_size(len(F), inst.k) for F in inst.h.hyperedges]


def generate_assignment_family(inst: HPInstance, limit: int = FAMILY_LIMIT) -> list[Assignment]:
    """The full color-coding family, one assignment per ``(S, kappa, kappa0)``.

    ``S`` runs over a cover family of hyperedge indices (``y = k``, ``z = q``),
    ``kappa`` over a perfect family from ``S`` into ``k`` slots and ``kappa0``
    over all maps from slots to ``1..alpha_max``.  A hyperedge in ``S`` gets
    ``kappa0(kappa(F))``, or 0 when that exceeds its own list length; every
    other hyperedge gets 0.
    """
    m, k = len(inst.h.hyperedges), inst.k
    if k == 0:
        return [tuple([0] * m)]
    alphas = [len(c) for c in candidate_lists(inst)]
    funcs = all_functions(k, max(alphas, default=1))
    family = []
    for S in cover_family(m, k, inst.q):
        for kappa in perfect_family(len(S), k):
            for kappa0 in funcs:
                family.append(family_member(m, alphas, S, kappa, kappa0))
                if len(family) > limit:
                    raise GateExceeded(f"assignment family exceeds the limit {limit}")
    return family


def family_member(
    m: int, alphas: Sequence[int], S, kappa: Sequence[int], kappa0: Sequence[int]
) -> Assignment:
    """The assignment for one ``(S, kappa, kappa0)`` triple.

    ``kappa`` maps positions in sorted ``S`` to slots, ``kappa0`` maps slots
    to candidate indices; indices past a hyperedge's list length become 0.
    """
    p = [0] * m
    for pos, F in enumerate(sorted(S)):
        i = kappa0[kappa[pos]]
        p[F] = i if i <= alphas[F] else 0
    return tuple(p)


def iter_reduced_family(inst: HPInstance, viable: Sequence[Sequence[bool]]) -> Iterator[Assignment]:
    """Distinct images of the family after unpinning non-viable pins.

    ``viable[F][i - 1]`` says whether pinning candidate ``i`` on ``F`` can
    ever be useful.  Choosing ``kappa0`` slot by slot yields exactly the
    reduced images of all ``kappa0``, since slots receive independent values.
    """
    m, k = len(inst.h.hyperedges), inst.k
    if k == 0:
        yield tuple([0] * m)
        return
    alpha_max = max((len(v) for v in viable), default=1)
    seen: set[Assignment] = set()
    for S in cover_family(m, k, inst.q):
        members = sorted(S)
        for kappa in perfect_family(len(members), k):
            slots: list[list[int]] = [[] for _ in range(k)]
            for pos, F in enumerate(members):
                slots[kappa[pos]].append(F)
            options = []
            for group in slots:
                opts = {
                    tuple((F, i) for F in group if i <= len(viable[F]) and viable[F][i - 1])
                    for i in range(1, alpha_max + 1)
                }
                options.append(sorted(opts))
            for combo in product(*options):
                p = [0] * m
                for pins in combo:
                    for F, i in pins:
                        p[F] = i
                key = tuple(p)
                if key not in seen:
                    seen.add(key)
                    yield key


class _RollbackUnion:
    """Union-find with undo; every root carries the single color painted on it (or -1)."""

    __slots__ = ("parent", "size", "paint", "log")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.paint = [-1] * n
        self.log: list[tuple] = []

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        pa, pb = self.paint[ra], self.paint[rb]
        if pa != -1 and pb != -1 and pa != pb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.log.append((rb, ra, self.paint[ra]))
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        if self.paint[ra] == -1:
            self.paint[ra] = self.paint[rb]
        return True

    def color(self, x: int, c: int) -> bool:
        r = self.find(x)
        if self.paint[r] == -1:
            self.log.append((r, r, -1))
            self.paint[r] = c
            return True
        return self.paint[r] == c

    def rollback(self, mark: int) -> None:
        while len(self.log) > mark:
            child, root, old_paint = self.log.pop()
            if child != root:
                self.parent[child] = child
                self.size[root] -= self.size[child]
            self.paint[root] = old_paint


def iter_realizable_family(inst: HPInstance, candidates, max_pins: int | None = None) -> Iterator[Assignment]:
    """Assignments pinning at most ``k`` hyperedges that some coloring realizes exactly.

    An assignment is realizable when each component of its clique expansion
    receives at most one color from the pins; a coloring then exists under
    which the pinned hyperedges are exactly the multichromatic ones, pinned to
    their true restrictions.  For any witnessing coloring of a favorable
    instance that assignment is good, because at most ``k`` hyperedges are
    multichromatic.  Pins must be non-constant, accepted somewhere, and
    jointly fit the budgets.
    """
    for p, _, _ in _realizable_states(inst, candidates, max_pins):
        yield p


def _realizable_states(inst: HPInstance, candidates, max_pins: int | None = None) -> list:
    """Realizable assignments with their component roots and the color
    painted into each root.

    Hyperedges are decided in order; decided cliques only ever merge
    components, so a color clash prunes the whole branch.
    """
    hyperedges, painting, lay = inst.h.hyperedges, inst.painting, inst.layout
    n, m = inst.h.n, len(hyperedges)
    cap = inst.k if max_pins is None else max_pins
    options: list[list[tuple[int, Coloring, int]]] = []
    for idx, F in enumerate(hyperedges):
        opts = []
        for i, lam in enumerate(candidates[idx], start=1):
            if len(set(lam)) > 1:
                mask = painting[idx].mask(lam)
                if mask:
                    opts.append((i, lam, mask))
        options.append(opts)
    uf = _RollbackUnion(n)
    p = [0] * m
    out: list = []

    def rec(i: int, pins: int, acc: int) -> None:
        if i == m:
            roots = [uf.find(v) for v in range(n)]
            paints = {r: uf.paint[r] for r in set(roots) if uf.paint[r] != -1}
            out.append((tuple(p), roots, paints))
            return
        F = hyperedges[i]
        mark = len(uf.log)
        if all(uf.union(F[0], v) for v in F[1:]):
            rec(i + 1, pins, acc)
        uf.rollback(mark)
        if pins >= cap:
            return
        for j, lam, mask in options[i]:
            nxt = lay.conv(acc, mask)
            if not nxt:
                continue
            ok = True
            first: dict[int, int] = {}
            for v, c in zip(F, lam):
                if c in first:
                    ok = uf.union(first[c], v)
                else:
                    first[c] = v
                    ok = uf.color(v, c)
                if not ok:
                    break
            if ok:
                p[i] = j
                rec(i + 1, pins + 1, nxt)
                p[i] = 0
            uf.rollback(mark)

    rec(0, 0, lay.bit(0, 0, 0))
    return out


def planted_edge_classes(inst: HPInstance, coloring: Sequence[int]) -> tuple[list[int], list[int], int]:
    """Multichromatic hyperedges and forest hyperedges of the minority color classes.

    The majority color is the smallest color with the largest class.
    Returns ``(E_m, E_s, majority)`` as sorted hyperedge indices.
    """
    k = inst.k
    counts = [sum(1 for c in coloring if c == i) for i in range(k + 1)]
    big = max(range(k + 1), key=lambda i: (counts[i], -i))
    E_m = [idx for idx, F in enumerate(inst.h.hyperedges) if len({coloring[v] for v in F}) > 1]
    E_s: list[int] = []
    for i in range(k + 1):
        if i == big:
            continue
        members = [idx for idx, F in enumerate(inst.h.hyperedges) if all(coloring[v] == i for v in F)]
        if not members:
            continue
        verts = sorted({v for idx in members for v in inst.h.hyperedges[idx]})
        local = {v: j for j, v in enumerate(verts)}
        sub = Hypergraph(len(verts), [[local[v] for v in inst.h.hyperedges[idx]] for idx in members])
        E_s.extend(members[j] for j in hypergraph_spanning_forest(sub))
    return E_m, sorted(E_s), big


def is_good_assignment(inst: HPInstance, p: Assignment, coloring: Sequence[int], candidates=None) -> bool:
    """Whether ``p`` pins every multichromatic hyperedge to its true restriction
    and leaves the minority forest hyperedges unpinned."""
    E_m, E_s, _ = planted_edge_classes(inst, coloring)
    cands = candidates if candidates is not None else candidate_lists(inst)
    if any(p[F] != 0 for F in E_s):
        return False
    for F in E_m:
        restriction = tuple(coloring[v] for v in inst.h.hyperedges[F])
        if p[F] == 0 or cands[F][p[F] - 1] != restriction:
            return False
    return True


# ----------------------------------------------------------------------------
# Normalization


@dataclass
class PaintedComponents:
    """Component structure of a normalized assignment.

    ``comp_of[v]`` indexes the component of ``v`` in the clique expansion of
    the assignment; ``labels[c]`` is the collapsed label set (at most one
    color).  Components are linked into ``groups`` of ``(vertices, member
    components)``; ``group_edges[g]`` lists the hyperedges evaluated with
    group ``g``, and ``zero_group[g]`` marks a lone majority-labelled
    component.
    """

    big: int
    k: int
    comp_of: list[int]
    components: list[frozenset[int]]
    labels: list[frozenset[int]]
    group_of: list[int]
    groups: list[tuple[frozenset[int], tuple[int, ...]]]
    group_edges: list[tuple[int, ...]]
    zero_group: list[bool]

    def is_zero_component(self, c: int) -> bool:
        return self.labels[c] == frozenset({self.big})

    def phi(self, g: int, c: int) -> dict[int, int]:
        """Coloring of group ``g`` for choice ``c``: majority everywhere when
        ``c`` is the majority color, otherwise labels where present and ``c``
        on unlabelled components."""
        col = {}
        for comp in self.groups[g][1]:
            lab = self.labels[comp]
            value = self.big if c == self.big else (next(iter(lab)) if lab else c)
            for v in self.components[comp]:
                col[v] = value
        return col

    def colorings(self, g: int) -> list[dict[int, int]]:
        """The distinct colorings ``phi(g, c)`` over ``c`` in ``0..k``."""
        out: list[dict[int, int]] = []
        for c in range(self.k + 1):
            col = self.phi(g, c)
            if col not in out:
                out.append(col)
        return out

    def group_key(self, g: int) -> frozenset:
        return frozenset((self.components[c], self.labels[c]) for c in self.groups[g][1])

    def depends_on_big(self, g: int, hyperedges) -> bool:
        """Whether the group's colorings or its hyperedges' outside vertices
        change with the majority color."""
        if any(self.labels[c] for c in self.groups[g][1]):
            return True
        inside = self.groups[g][0]
        return any(v not in inside for idx in self.group_edges[g] for v in hyperedges[idx])


def _clique_roots(n: int, hyperedges, p: Sequence[int], cands) -> list[int]:
    dsu = DisjointSets(n)
    for idx, F in enumerate(hyperedges):
        if p[idx] == 0:
            for v in F[1:]:
                dsu.union(F[0], v)
        else:
            first: dict[int, int] = {}
            for v, c in zip(F, cands[idx][p[idx] - 1]):
                if c in first:
                    dsu.union(first[c], v)
                else:
                    first[c] = v
    return [dsu.find(v) for v in range(n)]


def normalize_assignment(
    inst: HPInstance, p: Assignment, big: int = 0, candidates=None, trace: list | None = None
) -> tuple[Assignment, PaintedComponents]:
    """Apply the three rules to a fixpoint and build the component structure.

    Rule 1 unpins a hyperedge lying inside one component.  Rule 2 unpins a
    pinned hyperedge painting a non-majority color into a component that some
    pinned hyperedge paints with the majority color.  Rule 3 unpins a pinned
    hyperedge meeting two majority-labelled components.  Rules are tried in
    that priority and components are rebuilt after every change.  With
    ``trace`` every change is recorded as ``(rule, hyperedge index, new p)``.
    """
    cands = candidates if candidates is not None else candidate_lists(inst)
    hyperedges = inst.h.hyperedges
    n = inst.h.n
    p = list(p)
    while True:
        root = _clique_roots(n, hyperedges, p, cands)
        fire = next((idx for idx, F in enumerate(hyperedges) if p[idx] and len({root[v] for v in F}) == 1), None)
        if fire is not None:
            _unpin(p, fire, 1, trace)
            continue
        painted: dict[int, list[tuple[int, int]]] = {}
        for idx, F in enumerate(hyperedges):
            if p[idx]:
                for v, c in zip(F, cands[idx][p[idx] - 1]):
                    painted.setdefault(root[v], []).append((idx, c))
        for r in sorted(painted):
            entries = painted[r]
            if any(c == big for _, c in entries):
                nonbig = [idx for idx, c in entries if c != big]
                if nonbig:
                    fire = min(nonbig)
                    break
        if fire is not None:
            _unpin(p, fire, 2, trace)
            continue
        labels = {}
        for r, entries in painted.items():
            lab = frozenset(c for _, c in entries)
            labels[r] = lab if len(lab) <= 1 else frozenset({big})
        zero = {r for r, lab in labels.items() if lab == frozenset({big})}
        fire = next(
            (idx for idx, F in enumerate(hyperedges) if p[idx] and len({root[v] for v in F} & zero) >= 2), None
        )
        if fire is not None:
            _unpin(p, fire, 3, trace)
            continue
        return tuple(p), _build_components(inst, root, labels, big)


def _unpin(p: list[int], idx: int, rule: int, trace: list | None) -> None:
    p[idx] = 0
    if trace is not None:
        trace.append((rule, idx, tuple(p)))


@dataclass
class _Skeleton:
    """Component structure that does not depend on the majority color."""

    comp_of: list[int]
    components: list[frozenset[int]]
    labels: list[frozenset[int]]
    edge_comps: list[tuple[int, ...]]


def _skeleton(inst: HPInstance, root: list[int], labels: dict[int, frozenset[int]]) -> _Skeleton:
    comp_ids: dict[int, int] = {}
    comp_of = [comp_ids.setdefault(r, len(comp_ids)) for r in root]
    members_of: list[set[int]] = [set() for _ in comp_ids]
    for v, c in enumerate(comp_of):
        members_of[c].add(v)
    comp_labels: list[frozenset[int]] = [frozenset()] * len(comp_ids)
    for r, lab in labels.items():
        comp_labels[comp_ids[r]] = lab
    edge_comps = [tuple(sorted({comp_of[v] for v in F})) for F in inst.h.hyperedges]
    return _Skeleton(comp_of, [frozenset(s) for s in members_of], comp_labels, edge_comps)


def _group_skeleton(inst: HPInstance, sk: _Skeleton, big: int) -> PaintedComponents:
    zero_label = frozenset({big})
    zero = [lab == zero_label for lab in sk.labels]
    dsu = DisjointSets(len(sk.components))
    for cs in sk.edge_comps:
        live = [c for c in cs if not zero[c]]
        for c in live[1:]:
            dsu.union(live[0], c)
    group_ids: dict[int, int] = {}
    group_of = [group_ids.setdefault(dsu.find(c), len(group_ids)) for c in range(len(sk.components))]
    members: list[list[int]] = [[] for _ in group_ids]
    for c, g in enumerate(group_of):
        members[g].append(c)
    groups = [(frozenset().union(*(sk.components[c] for c in ms)), tuple(ms)) for ms in members]
    zero_group = [len(ms) == 1 and zero[ms[0]] for ms in members]
    group_edges: list[list[int]] = [[] for _ in groups]
    for idx, cs in enumerate(sk.edge_comps):
        touched = {group_of[c] for c in cs}
        live = [g for g in touched if not zero_group[g]]
        if len(live) == 1:
            group_edges[live[0]].append(idx)
        elif not live and len(touched) == 1:
            group_edges[next(iter(touched))].append(idx)
        else:
            raise AssertionError(f"hyperedge {inst.h.hyperedges[idx]} does not belong to exactly one group")
    return PaintedComponents(
        big=big,
        k=inst.k,
        comp_of=sk.comp_of,
        components=sk.components,
        labels=sk.labels,
        group_of=group_of,
        groups=groups,
        group_edges=[tuple(e) for e in group_edges],
        zero_group=zero_group,
    )


def _build_components(inst: HPInstance, root: list[int], labels: dict[int, frozenset[int]], big: int) -> PaintedComponents:
    return _group_skeleton(inst, _skeleton(inst, root, labels), big)


# ----------------------------------------------------------------------------
# Favorable solver


def check_favorable(inst: HPInstance, limit: int = CHECK_LIMIT) -> list[str]:
    """Violations of the two locally checkable favorability properties.

    Hyperedges with more than ``limit`` colorings are skipped.
    """
    k, lay = inst.k, inst.layout
    threshold = 3 * k * k
    zero_budget = 0
    for mu in range(lay.b + 1):
        zero_budget |= lay.bit(mu, 0, 0)
    problems = []
    for idx, (F, f) in enumerate(zip(inst.h.hyperedges, inst.painting)):
        if (k + 1) ** len(F) > limit:
            continue
        for code in range((k + 1) ** len(F)):
            col = coloring_from_code(code, len(F), k)
            m = f.mask(col)
            if not m:
                continue
            if len(F) > threshold and not is_unbreakable_function(col, threshold, k):
                problems.append(f"hyperedge {idx} accepts the breakable coloring {col}")
            elif len(set(col)) > 1 and m & zero_budget:
                problems.append(f"hyperedge {idx} accepts the multichromatic coloring {col} with zero budgets")
    return problems


@dataclass
class HPStats:
    family_kind: str = ""
    family: int = 0
    evaluated: int = 0
    group_cache_hits: int = 0


@dataclass
class HPSolution:
    """Answer table plus what is needed to rebuild a witness for any 1-cell."""

    table: AJPTable
    exact: int
    producers: dict[int, tuple[int, Assignment]] = field(default_factory=dict)
    stats: HPStats = field(default_factory=HPStats)


class FavorableSolver:
    def __init__(self, inst: HPInstance):
        self.inst = inst
        self.lay = inst.layout
        self.cands = candidate_lists(inst)
        self._group_cache: dict[tuple, int] = {}
        self._skeletons: dict[Assignment, _Skeleton] = {}
        # Restriction of a full coloring list to each hyperedge, as a tuple.
        self._restrict = [
            itemgetter(*F) if len(F) > 1 else (lambda full, v=F[0]: (full[v],)) for F in inst.h.hyperedges
        ]
        self.viable = [
            [len(set(lam)) > 1 and f.mask(lam) != 0 for lam in cands]
            for cands, f in zip(self.cands, inst.painting)
        ]

    def release(self) -> None:
        """Drop caches filled while solving; witnesses still work without them."""
        self._group_cache.clear()
        self._skeletons.clear()

    def group_table(self, comps: PaintedComponents, g: int, stats: HPStats | None = None) -> int:
        big = comps.big if comps.depends_on_big(g, self.inst.h.hyperedges) else None
        key = (big, comps.group_key(g), comps.group_edges[g])
        got = self._group_cache.get(key)
        if got is not None:
            if stats:
                stats.group_cache_hits += 1
            return got
        out = 0
        for col in comps.colorings(g):
            out |= self._edges_under(comps.group_edges[g], col, comps.big)
        self._group_cache[key] = out
        return out

    def _masks_under(self, edges, col: dict[int, int], big: int) -> list[int]:
        full = [big] * self.inst.h.n
        for v, c in col.items():
            full[v] = c
        painting, restrict = self.inst.painting, self._restrict
        return [painting[idx].mask(restrict[idx](full)) for idx in edges]

    def _edges_under(self, edges, col: dict[int, int], big: int) -> int:
        acc = self.lay.bit(0, 0, 0)
        for m in self._masks_under(edges, col, big):
            acc = self.lay.conv(acc, m)
            if not acc:
                break
        return acc

    def evaluate(self, comps: PaintedComponents, stats: HPStats | None = None) -> int:
        acc = self.lay.bit(0, 0, 0)
        for g in range(len(comps.groups)):
            acc = self.lay.conv(acc, self.group_table(comps, g, stats))
            if not acc:
                break
        return acc

    def _states(self, mode: str):
        if mode == "paper":
            return [(p, *self._realize(p)) for p in iter_reduced_family(self.inst, self.viable)]
        return _realizable_states(self.inst, self.cands)

    def _realize(self, p: Assignment):
        """Component roots and painted colors when no component receives two
        colors from the pins, else ``(None, None)``."""
        uf = _RollbackUnion(self.inst.h.n)
        for idx, F in enumerate(self.inst.h.hyperedges):
            if p[idx] == 0:
                ok = all(uf.union(F[0], v) for v in F[1:])
            else:
                first: dict[int, int] = {}
                ok = True
                for v, c in zip(F, self.cands[idx][p[idx] - 1]):
                    if c in first:
                        ok = uf.union(first[c], v)
                    else:
                        first[c] = v
                        ok = uf.color(v, c)
                    if not ok:
                        break
            if not ok:
                return None, None
        roots = [uf.find(v) for v in range(self.inst.h.n)]
        # A pin inside one component is undone by the first rule.
        if any(p[idx] and len({roots[v] for v in F}) == 1 for idx, F in enumerate(self.inst.h.hyperedges)):
            return None, None
        return roots, {r: uf.paint[r] for r in set(roots) if uf.paint[r] != -1}

    def _components(self, p, roots, paints, big: int, shared=None) -> tuple[Assignment, PaintedComponents]:
        if roots is None:
            return normalize_assignment(self.inst, p, big, self.cands)
        if shared is not None and big not in paints.values():
            got = shared.get(p)
            if got is not None:
                return p, replace(got, big=big)
        # Realizable assignments never trigger the first two rules; check the third directly.
        zero = {r for r, c in paints.items() if c == big}
        if len(zero) >= 2:
            for idx, F in enumerate(self.inst.h.hyperedges):
                if p[idx] and len({roots[v] for v in F} & zero) >= 2:
                    return normalize_assignment(self.inst, p, big, self.cands)
        sk = self._skeletons.get(p)
        if sk is None:
            sk = _skeleton(self.inst, roots, {r: frozenset({c}) for r, c in paints.items()})
            self._skeletons[p] = sk
        comps = _group_skeleton(self.inst, sk, big)
        if shared is not None and big not in paints.values():
            shared[p] = comps
        return p, comps

    def solve(self, track_witness: bool = False, family: str = "realizable") -> HPSolution:
        """Answer table by evaluating every assignment of the chosen family.

        ``family`` is ``"paper"`` (the hash-family construction with useless
        pins dropped) or ``"realizable"`` (pinnings of at most ``k``
        hyperedges with consistent component colors).  Both contain a good
        assignment for every witnessing coloring; the second is never larger
        than the first's size bound and needs no rule applications.
        """
        if family not in FAMILIES:
            raise InputError(f"unknown assignment family {family!r}; expected one of {FAMILIES}")
        inst = self.inst
        stats = HPStats()
        exact = 0
        producers: dict[int, tuple[int, Assignment]] = {}
        if any(not any(f.mask((c,)) for c in range(inst.k + 1)) for F, f in zip(inst.h.hyperedges, inst.painting) if len(F) == 1):
            stats.family_kind = "empty"
            return HPSolution(AJPTable(self.lay, 0), 0, producers, stats)
        stats.family_kind = family
        states = self._states(family)
        stats.family = len(states)
        # Structures of realizable states with no component painted ``big`` do not depend on ``big``.
        shared: dict[Assignment, PaintedComponents] = {}
        for big in range(inst.k + 1):
            done: set[Assignment] = set()
            for p, roots, paints in states:
                final, comps = self._components(p, roots, paints, big, shared)
                if final in done:
                    continue
                done.add(final)
                stats.evaluated += 1
                res = self.evaluate(comps, stats)
                new = res & ~exact
                if new:
                    exact |= new
                    if track_witness:
                        for i in iter_bits(new):
                            producers[i] = (big, final)
        return HPSolution(AJPTable(self.lay, self.lay.upclose(exact)), exact, producers, stats)

    def witness(self, sol: HPSolution, cell: Cell) -> tuple[list[int], list[Cell]] | None:
        """Coloring of all vertices and per-hyperedge cells realizing ``cell``."""
        lay = self.lay
        mu, l1, l2 = cell
        exact_cell = next(
            ((mu, a, c) for a in range(l1 + 1) for c in range(l2 + 1) if sol.exact & lay.bit(mu, a, c)), None
        )
        if exact_cell is None:
            return None
        big, p = sol.producers[lay.index(*exact_cell)]
        _, comps = normalize_assignment(self.inst, p, big, self.cands)
        tables = [self.group_table(comps, g) for g in range(len(comps.groups))]
        group_cells = backtrack_splits(lay, tables, exact_cell)
        if group_cells is None:
            raise AssertionError("recorded producer does not realize its cell")
        coloring = [big] * self.inst.h.n
        splits: list[Cell] = [(0, 0, 0)] * len(self.inst.h.hyperedges)
        for g, target in enumerate(group_cells):
            edges = comps.group_edges[g]
            for col in comps.colorings(g):
                got = backtrack_splits(lay, self._masks_under(edges, col, big), target)
                if got is None:
                    continue
                for v, c in col.items():
                    coloring[v] = c
                for idx, s in zip(edges, got):
                    splits[idx] = s
                break
            else:
                raise AssertionError("group table does not realize its cell")
        return coloring, splits


def solve_hp_favorable(inst: HPInstance, check: bool = True, family: str = "realizable") -> AJPTable:
    """Answer table of a favorable instance.

    With ``check`` the locally checkable favorability properties are verified
    first and violations raise :class:`InputError`.
    """
    return solve_hp_detailed(inst, check=check, family=family).table


def solve_hp_detailed(
    inst: HPInstance, check: bool = True, track_witness: bool = False, family: str = "realizable"
) -> HPSolution:
    if check:
        problems = check_favorable(inst)
        if problems:
            raise InputError("instance is not favorable: " + "; ".join(problems[:3]))
    return FavorableSolver(inst).solve(track_witness, family)


class HPMemo:
    """Solved favorable instances keyed by their full content.

    Each entry keeps the solver and a witness-tracking solution, so witnesses
    can be rebuilt without solving again.  Instances whose dense painting
    tables exceed ``max_entries`` entries are solved without being stored.
    The store is emptied when it reaches ``maxsize`` entries.
    """

    def __init__(self, maxsize: int = 20_000, max_entries: int = 4096, family: str = "realizable"):
        self._entries: dict[tuple, tuple[FavorableSolver, HPSolution]] = {}
        self.maxsize = maxsize
        self.max_entries = max_entries
        self.family = family
        self.hits = 0
        self.misses = 0

    def signature(self, inst: HPInstance) -> tuple | None:
        if sum((inst.k + 1) ** len(F) for F in inst.h.hyperedges) > self.max_entries:
            return None
        dense = tuple(tuple(f.dense()) for f in inst.painting)
        return (inst.k1, inst.k2, inst.b, inst.h.n, inst.h.hyperedges, dense)

    def entry(self, inst: HPInstance) -> tuple[FavorableSolver, HPSolution]:
        key = self.signature(inst)
        got = self._entries.get(key) if key is not None else None
        if got is not None:
            self.hits += 1
            return got
        self.misses += 1
        if key is not None:
            # A dense copy drops references the painting functions may hold.
            inst = dense_instance(inst.k1, inst.k2, inst.b, inst.d, inst.q, inst.h.n, inst.h.hyperedges, key[5])
        solver = FavorableSolver(inst)
        got = (solver, solver.solve(track_witness=True, family=self.family))
        solver.release()
        if key is not None:
            if len(self._entries) >= self.maxsize:
                self._entries.clear()
            self._entries[key] = got
        return got

    def solve(self, inst: HPInstance) -> AJPTable:
        return self.entry(inst)[1].table

    def instances(self) -> Iterator[HPInstance]:
        """Stored instances, each a dense copy of one met during solving."""
        for solver, _ in self._entries.values():
            yield solver.inst


# ----------------------------------------------------------------------------
# Fixture format
#
#   hp <k1> <k2> <b> <d> <q> <n> <m>
#   edge <size> <v1> ... <vsize>        (m lines, in hyperedge order)
#   table <idx> <count>                 (one block per hyperedge)
#   <code> <mu> <l1> <l2>               (count lines: accepted cells)
#
# ``code`` is the mixed-radix coloring code over the sorted hyperedge, base k+1.


def format_hp(inst: HPInstance) -> str:
    lay = inst.layout
    lines = [f"hp {inst.k1} {inst.k2} {inst.b} {inst.d} {inst.q} {inst.h.n} {len(inst.h.hyperedges)}"]
    for F in inst.h.hyperedges:
        lines.append(" ".join(map(str, ("edge", len(F), *F))))
    for idx, f in enumerate(inst.painting):
        rows = [(code, *cell) for code, bits in enumerate(f.dense()) for cell in sorted(lay.cells(bits))]
        lines.append(f"table {idx} {len(rows)}")
        lines.extend(" ".join(map(str, r)) for r in rows)
    return "\n".join(lines) + "\n"


def parse_hp(text: str) -> HPInstance:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows or rows[0][0] != "hp" or len(rows[0]) != 8:
        raise InputError("fixture must start with 'hp k1 k2 b d q n m'")
    try:
        k1, k2, b, d, q, n, m = (int(x) for x in rows[0][1:])
        pos = 1
        hyperedges = []
        for _ in range(m):
            r = rows[pos]
            if r[0] != "edge" or len(r) != 2 + int(r[1]):
                raise InputError(f"malformed hyperedge line: {' '.join(r)}")
            hyperedges.append([int(x) for x in r[2:]])
            pos += 1
        lay = layout(b, k1, k2)
        k = k1 + k2
        tables = []
        for idx in range(m):
            r = rows[pos]
            if r[0] != "table" or len(r) != 3 or int(r[1]) != idx:
                raise InputError(f"expected 'table {idx} <count>', got {' '.join(r)}")
            count = int(r[2])
            dense = [0] * (k + 1) ** len(set(hyperedges[idx]))
            for line in rows[pos + 1 : pos + 1 + count]:
                code, mu, l1, l2 = (int(x) for x in line)
                if not 0 <= code < len(dense) or not lay.bit(mu, l1, l2):
                    raise InputError(f"table entry out of range: {' '.join(line)}")
                dense[code] |= lay.bit(mu, l1, l2)
            pos += 1 + count
            tables.append(dense)
    except (IndexError, ValueError) as exc:
        raise InputError(f"malformed fixture: {exc}") from None
    if pos != len(rows):
        raise InputError("trailing lines after the last table")
    return dense_instance(k1, k2, b, d, q, n, hyperedges, tables)


def read_hp(path: str) -> HPInstance:
    with open(path) as fh:
        return parse_hp(fh.read())


def write_hp(inst: HPInstance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(format_hp(inst))
