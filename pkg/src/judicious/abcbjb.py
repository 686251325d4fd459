"""Full-table solver for connected bipartite instances with forced vertices.

Given a connected bipartite multigraph with bipartition ``(P, Q)``, disjoint
sets ``A`` (forced into ``V1``) and ``B`` (forced into ``V2``) and budgets
``k1, k2``, the output table has a 1 at ``(mu, l1, l2)`` when some partition
with ``|V1| = mu`` puts at most ``l_i`` edges inside ``V_i``.

Colorings into ``0..k`` are turned into partitions by a color vector ``v``: a
vertex of ``P`` goes to ``V1`` iff ``v[color] == 0``, a vertex of ``Q`` iff
``v[color] == 1``.  The solver walks the decomposition bottom-up and, for each
node, each unbreakable coloring of its adhesion and each color vector, builds
one painting instance on the bag and solves it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping, Sequence

from .decomposition import TreeDecomposition, trivial_decomposition, validate_highly_connected, validate_tree_decomposition
from .errors import InputError
from .graph import (
    Bipartition,
    Hypergraph,
    MultiGraph,
    enumerate_unbreakable_functions,
    is_bipartition,
    is_connected,
    is_unbreakable_function,
)
from .hp import FavorableSolver, HPInstance, HPMemo, PaintingFunction, solve_hp_detailed
from .tables import AJPTable, layout

V1, V2 = 1, 2
ColorVector = tuple[int, ...]
YKey = tuple[tuple[int, ...], ColorVector]


@dataclass(frozen=True)
class AbcInstance:
    g: MultiGraph
    bipartition: Bipartition
    A: frozenset[int]
    B: frozenset[int]
    k1: int
    k2: int

    def __post_init__(self) -> None:
        if self.k1 < 0 or self.k2 < 0:
            raise InputError("budgets must be nonnegative")
        if self.A & self.B:
            raise InputError("A and B must be disjoint")
        if not (self.A | self.B) <= set(self.g.vertices()):
            raise InputError("A and B must be vertex subsets")
        if self.g.n == 0 or not is_connected(self.g):
            raise InputError("the graph must be connected and nonempty")
        if not is_bipartition(self.g, self.bipartition.P, self.bipartition.Q):
            raise InputError("the given sides are not a bipartition of the graph")

    @property
    def k(self) -> int:
        return self.k1 + self.k2


def all_color_vectors(k: int) -> list[ColorVector]:
    return list(product((0, 1), repeat=k + 1))


def side_of(vertex: int, color: int, v: ColorVector, P: frozenset[int]) -> int:
    if vertex in P:
        return V1 if v[color] == 0 else V2
    return V1 if v[color] == 1 else V2


def translate(coloring: Mapping[int, int], v: ColorVector, bipartition: Bipartition) -> dict[int, int]:
    """Side (``V1`` or ``V2``) of every colored vertex under color vector ``v``."""
    if len(v) == 0 or any(c >= len(v) or c < 0 for c in coloring.values()):
        raise InputError("color vector is too short for the coloring")
    return {x: side_of(x, c, v, bipartition.P) for x, c in coloring.items()}


def canonical_key(ups: Sequence[int], v: ColorVector) -> YKey:
    """Representative of ``(ups, v)`` under renaming the colors.

    Renaming colors by ``pi`` while permuting ``v`` along leaves node tables
    unchanged.  Colors used by ``ups`` are renamed in order of first
    appearance; the unused ones are ordered by their ``v`` entry.
    """
    order: list[int] = []
    for c in ups:
        if c not in order:
            order.append(c)
    used = set(order)
    order.extend(sorted((c for c in range(len(v)) if c not in used), key=lambda c: (v[c], c)))
    rename = {c: i for i, c in enumerate(order)}
    return tuple(rename[c] for c in ups), tuple(v[c] for c in order)


HPHook = Callable[[int, tuple[int, ...], ColorVector, HPInstance, AJPTable], None]
HPSolve = Callable[[HPInstance], AJPTable]


def _default_hp(inst: HPInstance) -> AJPTable:
    return solve_hp_detailed(inst, check=False).table


class AbcSolver:
    """Bottom-up table computation over a decomposition.

    ``y[t][(coloring of sorted sigma(t), v)]`` holds the table of node ``t``.
    With ``symmetry`` only one key per color-renaming class is solved and
    stored; lookups go through :func:`canonical_key`.
    """

    def __init__(
        self,
        inst: AbcInstance,
        td: TreeDecomposition | None = None,
        hp_solve: HPSolve | None = None,
        on_hp: HPHook | None = None,
        validate: bool = True,
        symmetry: bool = True,
        hp_memo: HPMemo | None = None,
    ):
        self.inst = inst
        self.symmetry = symmetry
        self.td = td if td is not None else trivial_decomposition(inst.g)
        if validate:
            rep = validate_tree_decomposition(inst.g, self.td)
            if rep.ok:
                rep = validate_highly_connected(inst.g, self.td, inst.k)
            if not rep.ok:
                node, cond, detail = rep.violations[0]
                raise InputError(f"invalid decomposition at node {node} ({cond}): {detail}")
        self.hp_memo = hp_memo
        self.hp_solve = hp_solve or (hp_memo.solve if hp_memo is not None else _default_hp)
        self.on_hp = on_hp
        self.lay = layout(inst.g.n, inst.k1, inst.k2)
        self.y: dict[int, dict[YKey, int]] = {}
        self.table: AJPTable | None = None

    def sigma_colorings(self, t: int) -> list[tuple[int, ...]]:
        k = self.inst.k
        return enumerate_unbreakable_functions(sorted(self.td.sigma(t)), 3 * k * k, k)

    def hp_instance(self, t: int, ups: Sequence[int], v: ColorVector) -> HPInstance:
        """Painting instance on the bag of ``t`` for adhesion coloring ``ups`` and vector ``v``."""
        inst, td, lay = self.inst, self.td, self.lay
        g, k = inst.g, inst.k
        P = inst.bipartition.P
        bag = sorted(td.bag(t))
        local = {x: i for i, x in enumerate(bag)}
        pinned = dict(zip(sorted(td.sigma(t)), ups))
        hyperedges: list[list[int]] = []
        painting_fns: list[Callable] = []

        for x in bag:
            hyperedges.append([local[x]])
            painting_fns.append(self._type1(x, pinned.get(x), v))

        bagset = set(bag)
        for (a, b), mult in g.multiplicities().items():
            if a in bagset and b in bagset:
                for _ in range(mult):
                    hyperedges.append([local[a], local[b]])
                    painting_fns.append(self._type2(a, b, v))

        for child in td.children[t]:
            sig = sorted(td.sigma(child))
            if not sig:
                raise InputError(f"node {child} has an empty adhesion")
            hyperedges.append([local[x] for x in sig])
            painting_fns.append(self._type3(child, sig, v))

        h = Hypergraph(len(bag), hyperedges)
        # Hypergraph sorts each hyperedge; local ids follow the sorted bag, so order is preserved.
        painting = [PaintingFunction(F, k, lay, fn) for F, fn in zip(h.hyperedges, painting_fns)]
        eta = td.eta
        return HPInstance(inst.k1, inst.k2, g.n, eta, (eta + k) * k, h, painting)

    def _type1(self, x: int, fixed: int | None, v: ColorVector):
        inst, lay = self.inst, self.lay
        P = inst.bipartition.P

        def mask(col):
            (c,) = col
            if fixed is not None and c != fixed:
                return 0
            side = side_of(x, c, v, P)
            if x in inst.A:
                return lay.bit(1, 0, 0) if side == V1 else 0
            if x in inst.B:
                return lay.bit(0, 0, 0) if side == V2 else 0
            return lay.bit(1 if side == V1 else 0, 0, 0)

        return mask

    def _type2(self, a: int, b: int, v: ColorVector):
        lay, P = self.lay, self.inst.bipartition.P
        any_budget = lay.budget_block(0)
        l1_pos = sum(lay.bit(0, l1, l2) for l1 in range(1, lay.k1 + 1) for l2 in range(lay.k2 + 1))
        l2_pos = sum(lay.bit(0, l1, l2) for l1 in range(lay.k1 + 1) for l2 in range(1, lay.k2 + 1))

        def mask(col):
            ca, cb = col
            sa, sb = side_of(a, ca, v, P), side_of(b, cb, v, P)
            if sa != sb:
                return any_budget if ca == cb else 0
            return l1_pos if sa == V1 else l2_pos

        return mask

    def _type3(self, child: int, sig: list[int], v: ColorVector):
        inst, lay = self.inst, self.lay
        g, k, P = inst.g, inst.k, inst.bipartition.P
        table = self.y[child]
        inner = [(a, b, m) for (a, b), m in g.multiplicities().items() if a in sig and b in sig]
        pos = {x: i for i, x in enumerate(sig)}

        def mask(col):
            if not is_unbreakable_function(col, 3 * k * k, k):
                return 0
            bits = table.get(self.key(col, v), 0)
            if not bits:
                return 0
            sides = [side_of(x, c, v, P) for x, c in zip(sig, col)]
            mu_shift = sum(1 for s in sides if s == V1)
            l1_shift = sum(m for a, b, m in inner if sides[pos[a]] == sides[pos[b]] == V1)
            l2_shift = sum(m for a, b, m in inner if sides[pos[a]] == sides[pos[b]] == V2)
            return lay.shift_down(bits, mu_shift, l1_shift, l2_shift)

        return mask

    def key(self, ups: Sequence[int], v: ColorVector) -> YKey:
        return canonical_key(ups, v) if self.symmetry else (tuple(ups), tuple(v))

    def run(self) -> AJPTable:
        td = self.td
        k = self.inst.k
        vectors = all_color_vectors(k)
        for t in td.postorder():
            entries: dict[YKey, int] = {}
            for ups in self.sigma_colorings(t):
                for v in vectors:
                    if self.symmetry and canonical_key(ups, v) != (tuple(ups), v):
                        continue
                    hp = self.hp_instance(t, ups, v)
                    table = self.hp_solve(hp)
                    if self.on_hp is not None:
                        self.on_hp(t, ups, v, hp, table)
                    if table.bits:
                        entries[(ups, v)] = table.bits
            self.y[t] = entries
        root_bits = 0
        for (_, _), bits in self.y[td.root].items():
            root_bits |= bits
        self.table = AJPTable(self.lay, root_bits)
        return self.table

    def y_bit(self, t: int, ups: Sequence[int], v: ColorVector, mu: int, l1: int, l2: int) -> bool:
        bits = self.y[t].get(self.key(ups, tuple(v)), 0)
        return bool(bits & self.lay.bit(mu, l1, l2))

    def witness(self, mu: int, l1: int, l2: int) -> tuple[frozenset[int], frozenset[int]] | None:
        """Partition ``(V1, V2)`` realizing a 1-cell of the computed table."""
        if self.table is None:
            self.run()
        cell_bit = self.lay.bit(mu, l1, l2)
        if not self.table.bits & cell_bit:
            return None
        root = self.td.root
        v = next(v for (_, v), bits in sorted(self.y[root].items()) if bits & cell_bit)
        coloring: dict[int, int] = {}
        self._descend(root, (), v, (mu, l1, l2), coloring)
        sides = translate(coloring, v, self.inst.bipartition)
        part1 = frozenset(x for x, s in sides.items() if s == V1)
        return part1, frozenset(self.inst.g.vertices()) - part1

    def _descend(self, t: int, ups, v: ColorVector, cell, coloring: dict[int, int]) -> None:
        hp = self.hp_instance(t, ups, v)
        if self.hp_memo is not None:
            solver, sol = self.hp_memo.entry(hp)
        else:
            solver = FavorableSolver(hp)
            sol = solver.solve(track_witness=True)
        found = solver.witness(sol, cell)
        if found is None:
            raise AssertionError(f"node {t} cannot realize cell {cell}")
        local_col, splits = found
        bag = sorted(self.td.bag(t))
        for x, c in zip(bag, local_col):
            coloring[x] = c
        P = self.inst.bipartition.P
        g = self.inst.g
        n_fixed = len(hp.h.hyperedges) - len(self.td.children[t])
        for child, split in zip(self.td.children[t], splits[n_fixed:]):
            sig = sorted(self.td.sigma(child))
            col = tuple(coloring[x] for x in sig)
            sides = {x: side_of(x, coloring[x], v, P) for x in sig}
            mu_shift = sum(1 for s in sides.values() if s == V1)
            l1_shift = sum(m for (a, b), m in g.multiplicities().items() if a in sides and b in sides and sides[a] == sides[b] == V1)
            l2_shift = sum(m for (a, b), m in g.multiplicities().items() if a in sides and b in sides and sides[a] == sides[b] == V2)
            target = (split[0] + mu_shift, split[1] + l1_shift, split[2] + l2_shift)
            self._descend(child, col, v, target, coloring)


def solve_abcbjb(
    inst: AbcInstance,
    td: TreeDecomposition | None = None,
    hp_solve: HPSolve | None = None,
    on_hp: HPHook | None = None,
) -> AJPTable:
    """Table of the instance, computed over ``td`` (trivial decomposition by default)."""
    return AbcSolver(inst, td, hp_solve, on_hp).run()
