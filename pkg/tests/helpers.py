"""Instance generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from typing import Iterator

import networkx as nx
from hypothesis import strategies as st
from networkx.generators.atlas import graph_atlas_g

from judicious.abcbjb import V1, AbcInstance, AbcSolver, translate
from judicious.decomposition import TreeDecomposition
from judicious.derand import cover_family, perfect_family
from judicious.graph import MultiGraph, find_bipartition, is_connected
from judicious.hp import (
    HPInstance,
    backtrack_splits,
    candidate_lists,
    dense_instance,
    family_member,
    is_good_assignment,
    iter_realizable_family,
    normalize_assignment,
    planted_edge_classes,
)
from judicious.graph import Hypergraph, coloring_from_code
from judicious.tables import layout


def random_multigraph(rng: random.Random, n: int, m: int) -> MultiGraph:
    if n < 2:
        return MultiGraph(n)
    return MultiGraph(n, [tuple(rng.sample(range(n), 2)) for _ in range(m)])


def random_connected_bipartite(rng: random.Random, n: int, extra: int, parallel: bool = True) -> MultiGraph:
    """Random spanning tree plus ``extra`` edges between opposite sides."""
    edges = [(v, rng.randrange(v)) for v in range(1, n)]
    g = MultiGraph(n, edges)
    bip = find_bipartition(g)
    P, Q = sorted(bip.P), sorted(bip.Q)
    for _ in range(extra):
        if not Q:
            break
        e = (rng.choice(P), rng.choice(Q))
        if parallel or e not in edges and e[::-1] not in edges:
            edges.append(e)
    return MultiGraph(n, edges)


def random_abc_instance(rng: random.Random, n: int, extra: int, k1: int, k2: int) -> AbcInstance:
    g = random_connected_bipartite(rng, n, extra)
    forced = rng.sample(range(n), rng.randint(0, min(n, 3)))
    cut = rng.randint(0, len(forced))
    return AbcInstance(g, find_bipartition(g), frozenset(forced[:cut]), frozenset(forced[cut:]), k1, k2)


def connected_atlas_graphs(max_n: int, max_m: int) -> Iterator[MultiGraph]:
    """Every connected simple graph up to isomorphism with the given bounds."""
    for G in graph_atlas_g():
        n = G.number_of_nodes()
        if 1 <= n <= max_n and G.number_of_edges() <= max_m and nx.is_connected(G):
            yield MultiGraph(n, list(G.edges()))


@st.composite
def multigraphs(draw, max_n: int = 7, max_m: int = 9) -> MultiGraph:
    n = draw(st.integers(min_value=0, max_value=max_n))
    if n < 2:
        return MultiGraph(n)
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    return MultiGraph(n, draw(st.lists(pair, max_size=max_m)))


@st.composite
def connected_bipartite_graphs(draw, max_n: int = 7, max_extra: int = 3) -> MultiGraph:
    n = draw(st.integers(min_value=1, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    extra = draw(st.integers(min_value=0, max_value=max_extra))
    return random_connected_bipartite(random.Random(seed), n, extra)


# ----------------------------------------------------------------------------
# Hand-built decompositions


def _decomp(n: int, edges, parents, bags, eta: int | None = None):
    g = MultiGraph(n, edges)
    eta = eta if eta is not None else max(2, max(len(b) for b in bags))
    return g, TreeDecomposition(parents, bags, eta)


def hand_built_decompositions() -> list[tuple[str, MultiGraph, TreeDecomposition]]:
    """Small graphs with explicit 2 to 4 node decompositions."""
    path = lambda n: [(i, i + 1) for i in range(n - 1)]
    out = []

    def add(name, n, edges, parents, bags):
        out.append((name, *_decomp(n, edges, parents, bags)))

    add("path4-2", 4, path(4), [-1, 0], [(0, 1, 2), (2, 3)])
    add("path5-2", 5, path(5), [-1, 0], [(0, 1, 2), (2, 3, 4)])
    add("path5-3", 5, path(5), [-1, 0, 1], [(0, 1), (1, 2, 3), (3, 4)])
    add("path6-3", 6, path(6), [-1, 0, 1], [(0, 1, 2), (2, 3, 4), (4, 5)])
    add("path6-4", 6, path(6), [-1, 0, 1, 2], [(0, 1), (1, 2), (2, 3, 4), (4, 5)])
    add("path7-3", 7, path(7), [-1, 0, 0], [(2, 3, 4), (0, 1, 2), (4, 5, 6)])
    add("path7-4", 7, path(7), [-1, 0, 1, 2], [(0, 1, 2), (2, 3), (3, 4, 5), (5, 6)])
    add("path4-mid", 4, path(4), [-1, 0, 0], [(1, 2), (0, 1), (2, 3)])
    add("double-edge-path", 4, [(0, 1), (0, 1), (1, 2), (2, 3), (2, 3)], [-1, 0], [(0, 1, 2), (2, 3)])
    add("star4", 5, [(0, 1), (0, 2), (0, 3), (0, 4)], [-1, 0, 0], [(0, 1, 2), (0, 3), (0, 4)])
    add("star4-4", 5, [(0, 1), (0, 2), (0, 3), (0, 4)], [-1, 0, 0, 0], [(0, 1), (0, 2), (0, 3), (0, 4)])
    add("spider", 7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)], [-1, 0, 0, 0], [(0, 1, 3, 5), (1, 2), (3, 4), (5, 6)])
    add("spider-deep", 6, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5)], [-1, 0, 1], [(0, 1, 4, 5), (1, 2), (2, 3)])
    add("tree-y", 6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)], [-1, 0, 0], [(0, 1, 2, 3), (3, 4), (3, 5)])
    add("caterpillar", 7, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (3, 6)], [-1, 0, 1], [(0, 1, 4), (1, 2, 5), (2, 3, 6)])
    # Theta graphs: two hubs joined by internally disjoint paths.
    theta222 = [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]
    add("theta-2-2-2", 5, theta222, [-1, 0], [(0, 1, 2, 3), (0, 1, 4)])
    add("theta-2-2-2-3node", 5, theta222, [-1, 0, 0], [(0, 1, 2), (0, 1, 3), (0, 1, 4)])
    theta224 = [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 5), (5, 6), (6, 1)]
    add("theta-2-2-4", 7, theta224, [-1, 0], [(0, 1, 2, 3), (0, 1, 4, 5, 6)])
    add("theta-2-2-4-3node", 7, theta224, [-1, 0, 1], [(0, 1, 2, 3), (0, 1, 4, 6), (4, 5, 6)])
    theta244 = [(0, 2), (2, 1), (0, 3), (3, 7), (7, 8), (8, 1), (0, 4), (4, 5), (5, 6), (6, 1)]
    add("theta-2-4-4", 9, theta244, [-1, 0, 0], [(0, 1, 2), (0, 1, 3, 7, 8), (0, 1, 4, 5, 6)])
    add("c6-2", 6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], [-1, 0], [(0, 1, 2, 3), (0, 3, 4, 5)])
    add("c6-3", 6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], [-1, 0, 1], [(0, 1, 2, 3), (0, 3, 4), (0, 4, 5)])
    add("k23", 5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)], [-1, 0], [(0, 1, 2, 3), (0, 1, 4)])
    return out


# ----------------------------------------------------------------------------
# Painting instances


def random_favorable_hp(rng: random.Random, n: int, k1: int, k2: int, max_size: int = 3) -> HPInstance:
    """Dense instance that is favorable by construction.

    Multichromatic colorings only accept cells with a positive budget, every
    hyperedge is far below the local threshold, and ``q = n`` makes every
    coloring globally unbreakable.
    """
    k = k1 + k2
    lay = layout(n, k1, k2)
    cells = [(mu, a, c) for mu in range(n + 1) for a in range(k1 + 1) for c in range(k2 + 1)]
    hyperedges = [[v] for v in range(n)]
    for _ in range(rng.randint(0, n + 2)):
        size = rng.randint(1, min(max_size, n))
        hyperedges.append(rng.sample(range(n), size))
    tables = []
    for F in hyperedges:
        size = len(set(F))
        table = []
        for code in range((k + 1) ** size):
            col = coloring_from_code(code, size, k)
            allowed = cells if len(set(col)) == 1 else [c for c in cells if c[1] + c[2] >= 1]
            bits = 0
            if rng.random() < 0.7:
                for cell in rng.sample(allowed, min(len(allowed), rng.randint(0, 3))):
                    bits |= lay.bit(*cell)
            table.append(bits)
        tables.append(table)
    d = max(len(set(F)) for F in hyperedges) if hyperedges else 0
    return dense_instance(k1, k2, n, max(d, 1), n, n, hyperedges, tables)


def plant_instance(rng: random.Random, n: int, extra: int, k1: int, k2: int, tries: int = 200, min_cross: int = 0):
    """Root painting instance of a random bipartite graph with a planted witness.

    A coloring with a dominant color and a color vector are drawn until every
    cross-color edge joins two vertices on one side; the budgets are then the
    resulting intra-side edge counts.  At least ``min_cross`` edges must be
    cross-color.  Returns ``(hp, coloring, cell)`` or
    ``None`` when no draw qualified.
    """
    k = k1 + k2
    for _ in range(tries):
        g = random_connected_bipartite(rng, n, extra)
        bip = find_bipartition(g)
        big = rng.randrange(k + 1)
        coloring = {v: (big if rng.random() < 0.6 else rng.randrange(k + 1)) for v in g.vertices()}
        vec = tuple(rng.randrange(2) for _ in range(k + 1))
        sides = translate(coloring, vec, bip)
        ok = all(
            sides[a] == sides[b] for (a, b) in g.multiplicities() if coloring[a] != coloring[b]
        )
        cross = sum(1 for (a, b) in g.edge_list() if coloring[a] != coloring[b])
        if not ok or cross < min_cross:
            continue
        e1 = sum(m for (a, b), m in g.multiplicities().items() if sides[a] == sides[b] == V1)
        e2 = sum(m for (a, b), m in g.multiplicities().items() if sides[a] == sides[b] != V1)
        if e1 > k1 or e2 > k2:
            continue
        A = frozenset(v for v in rng.sample(range(n), min(n, 2)) if sides[v] == V1)
        inst = AbcInstance(g, bip, A, frozenset(), k1, k2)
        hp = AbcSolver(inst).hp_instance(0, (), vec)
        mu = sum(1 for s in sides.values() if s == V1)
        return hp, [coloring[v] for v in g.vertices()], (mu, k1, k2)
    return None


def _paper_family_candidates(hp: HPInstance, cands, coloring, E_m, E_s):
    """Family members that can be good: for each cover set and perfect map,
    the member whose slot values are the true candidate indices of ``E_m``.

    The family holds every slot-to-index map, so a good member exists iff one
    of these is good.  Listing the whole family is far too slow.
    """
    m, k = len(hp.h.hyperedges), hp.k
    if k == 0:
        yield tuple([0] * m)
        return
    alphas = [len(c) for c in cands]
    truth = {F: cands[F].index(tuple(coloring[v] for v in hp.h.hyperedges[F])) + 1 for F in E_m}
    for S in cover_family(m, k, hp.q):
        members = sorted(S)
        for kappa in perfect_family(len(members), k):
            kappa0 = [1] * k
            for pos, F in enumerate(members):
                if F in truth:
                    kappa0[kappa[pos]] = truth[F]
            yield family_member(m, alphas, S, kappa, kappa0)


def planted_violations(hp: HPInstance, coloring, cell, family: str = "paper") -> list[str]:
    """Every structural claim about a planted witnessing coloring that fails.

    Checks the edge class bounds, that the family holds a good assignment,
    that each rule application keeps it good, and the component, label,
    majority-component, coloring and partition properties of the result.
    """
    out: list[str] = []
    lay, k = hp.layout, hp.k
    masks = [f.mask(tuple(coloring[v] for v in F)) for F, f in zip(hp.h.hyperedges, hp.painting)]
    if backtrack_splits(lay, masks, cell) is None:
        return ["planted coloring is not a witness"]
    E_m, E_s, big = planted_edge_classes(hp, coloring)
    if len(E_s) > hp.q:
        out.append(f"|E_s| = {len(E_s)} > q = {hp.q}")
    if len(E_m) > k:
        out.append(f"|E_m| = {len(E_m)} > k = {k}")
    cands = candidate_lists(hp)
    if family == "paper":
        members = _paper_family_candidates(hp, cands, coloring, E_m, E_s)
    else:
        members = iter_realizable_family(hp, cands)
    good = next((p for p in members if is_good_assignment(hp, p, coloring, cands)), None)
    if good is None:
        return out + ["family has no good assignment"]
    trace: list = []
    final, comps = normalize_assignment(hp, good, big, cands, trace)
    for rule, idx, p in trace:
        if not is_good_assignment(hp, p, coloring, cands):
            out.append(f"rule {rule} on hyperedge {idx} broke goodness")
    incident = {v for idx in E_m for v in hp.h.hyperedges[idx] if coloring[v] == big}
    for c, D in enumerate(comps.components):
        colors = {coloring[v] for v in D}
        if len(colors) != 1:
            out.append(f"component {sorted(D)} is not monochromatic")
            continue
        (color,) = colors
        lab = comps.labels[c]
        if lab and color not in lab | {big}:
            out.append(f"component {sorted(D)} has color {color} outside its label {set(lab)}")
        if lab == frozenset({big}) and color != big:
            out.append(f"majority-labelled component {sorted(D)} has color {color}")
        if D & incident and not comps.is_zero_component(c):
            out.append(f"component {sorted(D)} meets a multichromatic hyperedge in the majority color")
    for g, (verts, _) in enumerate(comps.groups):
        truth = {v: coloring[v] for v in verts}
        if truth not in comps.colorings(g):
            out.append(f"group {sorted(verts)} has no matching candidate coloring")
    owners = sorted(idx for edges in comps.group_edges for idx in edges)
    if owners != list(range(len(hp.h.hyperedges))):
        out.append("group hyperedge sets do not partition the hyperedges")
    for idx, F in enumerate(hp.h.hyperedges):
        touched = {comps.group_of[comps.comp_of[v]] for v in F}
        if len(touched) > 1:
            zero = [g for g in touched if comps.zero_group[g]]
            if len(touched) != 2 or len(zero) != 1:
                out.append(f"hyperedge {F} straddles groups {sorted(touched)}")
    return out


def cover_violations(n, y, z, family):
    """Disjoint pairs (Y, Z) with no member containing Y and avoiding Z."""
    masks = [sum(1 << e for e in S) for S in family]
    bad = []
    for a in range(y + 1):
        for Y in itertools.combinations(range(n), a):
            ym = sum(1 << e for e in Y)
            rest = [e for e in range(n) if e not in Y]
            for b in range(z + 1):
                for Z in itertools.combinations(rest, b):
                    zm = sum(1 << e for e in Z)
                    if not any(m & ym == ym and not m & zm for m in masks):
                        bad.append((Y, Z))
    return bad


def perfect_violations(n, r, family):
    """Members outside ``{0..r-1}^n``, then ``r``-subsets no member maps injectively."""
    bad = [f for f in family if len(f) != n or any(not 0 <= x < max(r, 1) for x in f)]
    return bad + [X for X in itertools.combinations(range(n), r) if not any(len({f[e] for e in X}) == r for f in family)]
