"""Multigraph and hypergraph primitives.

Vertices are the integers ``0..n-1``.  Edges are unordered pairs stored with a
multiplicity, so parallel edges are first-class and every edge count in the
package is taken with multiplicity.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GateExceeded, InputError

DEFAULT_UNBREAKABLE_LIMIT = 18


class MultiGraph:
    """Undirected multigraph without self-loops on vertices ``0..n-1``."""

    __slots__ = ("_n", "_mult", "_adj", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InputError(f"vertex count must be nonnegative, got {n}")
        mult: Counter = Counter()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InputError(f"self-loop at vertex {u} is not allowed")
            mult[(u, v) if u < v else (v, u)] += 1
        self._n = n
        self._mult = dict(sorted(mult.items()))
        self._m = sum(self._mult.values())
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in self._mult:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(s) for s in adj)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        """Number of edges counted with multiplicity."""
        return self._m

    def vertices(self) -> range:
        return range(self._n)

    def multiplicities(self) -> dict[tuple[int, int], int]:
        """Map from each adjacent pair ``(u, v)`` with ``u < v`` to its edge count."""
        return dict(self._mult)

    def multiplicity(self, u: int, v: int) -> int:
        return self._mult.get((u, v) if u < v else (v, u), 0)

    def edge_list(self) -> list[tuple[int, int]]:
        """Sorted edge list, one entry per parallel copy."""
        return [e for e, c in self._mult.items() for _ in range(c)]

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def count_edges_within(self, vertices: Iterable[int]) -> int:
        """Number of edges (with multiplicity) with both ends in ``vertices``."""
        s = set(vertices)
        return sum(c for (u, v), c in self._mult.items() if u in s and v in s)

    def induced(self, vertices: Iterable[int]) -> tuple["MultiGraph", list[int]]:
        """Induced subgraph relabelled to ``0..len-1`` in increasing id order.

        Returns the subgraph and the list mapping new ids to old ids.
        """
        old = sorted(set(vertices))
        new_id = {v: i for i, v in enumerate(old)}
        edges = [
            (new_id[u], new_id[v])
            for (u, v), c in self._mult.items()
            if u in new_id and v in new_id
            for _ in range(c)
        ]
        return MultiGraph(len(old), edges), old

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultiGraph) and self._n == other._n and self._mult == other._mult

    def __hash__(self) -> int:
        return hash((self._n, tuple(self._mult.items())))

    def __repr__(self) -> str:
        return f"MultiGraph(n={self._n}, edges={self.edge_list()})"


@dataclass(frozen=True)
class Bipartition:
    """Ordered pair of independent sets covering the vertex set."""

    P: frozenset[int]
    Q: frozenset[int]

    def side_of(self, v: int) -> str:
        return "P" if v in self.P else "Q"


def is_bipartition(g: MultiGraph, P: Iterable[int], Q: Iterable[int]) -> bool:
    P, Q = set(P), set(Q)
    if P & Q or P | Q != set(g.vertices()):
        return False
    return all((u in P) != (v in P) for u, v in g.multiplicities())


@dataclass(frozen=True)
class Separation:
    """A pair ``(X, Y)`` covering V with no edge between ``X - Y`` and ``Y - X``."""

    X: frozenset[int]
    Y: frozenset[int]

    @property
    def order(self) -> int:
        return len(self.X & self.Y)


def is_separation(g: MultiGraph, X: Iterable[int], Y: Iterable[int]) -> bool:
    X, Y = frozenset(X), frozenset(Y)
    if X | Y != frozenset(g.vertices()):
        return False
    left, right = X - Y, Y - X
    return not any((u in left and v in right) or (u in right and v in left) for u, v in g.multiplicities())


class Hypergraph:
    """Multi-hypergraph on ``0..n-1``; hyperedges are sorted vertex tuples."""

    __slots__ = ("n", "hyperedges")

    def __init__(self, n: int, hyperedges: Iterable[Iterable[int]]):
        edges = tuple(tuple(sorted(set(F))) for F in hyperedges)
        covered: set[int] = set()
        for F in edges:
            if not F:
                raise InputError("hyperedges must be nonempty")
            if F[0] < 0 or F[-1] >= n:
                raise InputError(f"hyperedge {F} has a vertex outside 0..{n - 1}")
            covered.update(F)
        if len(covered) != n:
            missing = sorted(set(range(n)) - covered)
            raise InputError(f"isolated vertices are not allowed: {missing}")
        self.n = n
        self.hyperedges = edges

    def __len__(self) -> int:
        return len(self.hyperedges)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Hypergraph) and self.n == other.n and self.hyperedges == other.hyperedges

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, hyperedges={list(self.hyperedges)})"


class DisjointSets:
    """Union-find over ``0..n-1`` with path halving."""

    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True


def connected_components(g: MultiGraph, vertices: Iterable[int] | None = None) -> list[set[int]]:
    """Components of ``g`` (or of ``g`` induced on ``vertices``), ordered by smallest member."""
    allowed = set(g.vertices()) if vertices is None else set(vertices)
    seen: set[int] = set()
    out = []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        out.append(comp)
    return out


def is_connected(g: MultiGraph, vertices: Iterable[int] | None = None) -> bool:
    verts = set(g.vertices()) if vertices is None else set(vertices)
    return len(connected_components(g, verts)) <= 1


def find_bipartition(g: MultiGraph) -> Bipartition | None:
    """Canonical bipartition: the smallest id of each component goes to P."""
    side = [-1] * g.n
    for s in g.vertices():
        if side[s] != -1:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if side[w] == -1:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    return None
    P = frozenset(v for v in g.vertices() if side[v] == 0)
    Q = frozenset(v for v in g.vertices() if side[v] == 1)
    return Bipartition(P, Q)


def _subset_sums(values: Sequence[int]) -> set[int]:
    sums = {0}
    for x in values:
        sums |= {s + x for s in sums}
    return sums


def is_unbreakable_set(
    g: MultiGraph, a: Iterable[int], q: int, k: int, limit: int = DEFAULT_UNBREAKABLE_LIMIT
) -> bool:
    """Whether every separation of order at most ``k`` leaves at most ``q`` vertices
    of ``a`` strictly on one of its sides.

    Separations are enumerated exhaustively through their middle set ``X & Y``:
    once the middle is fixed, each component of the rest lies wholly on one
    side, so the remaining choice is a subset-sum over per-component counts.
    Sets with ``|a| <= q`` are accepted without enumeration.
    """
    a = set(a)
    if not a <= set(g.vertices()):
        raise InputError("the set must be a subset of the vertex set")
    if len(a) <= q:
        return True
    if g.n > limit:
        raise GateExceeded(f"unbreakability check on {g.n} vertices exceeds the limit {limit}")
    for size in range(min(k, g.n) + 1):
        for middle in itertools.combinations(range(g.n), size):
            rest = set(range(g.n)) - set(middle)
            counts = [len(c & a) for c in connected_components(g, rest)]
            total = sum(counts)
            if total <= 2 * q:
                continue
            if any(q < s < total - q for s in _subset_sums(counts)):
                return False
    return True


def is_unbreakable_function(coloring: Sequence[int], q: int, k: int) -> bool:
    """Some color class holds all but at most ``q`` entries (colors range over 0..k)."""
    if not coloring:
        return True
    counts = Counter(coloring)
    return len(coloring) - max(counts.values()) <= q


def enumerate_unbreakable_functions(universe: Sequence[int], q: int, k: int) -> list[tuple[int, ...]]:
    """All ``(q, k)``-unbreakable colorings of ``universe`` into ``0..k``.

    A coloring is a tuple aligned with ``universe``.  The list is duplicate-free
    and sorted lexicographically, which is the same as increasing mixed-radix
    code with the first element most significant.
    """
    size = len(universe)
    if q >= size:
        return list(itertools.product(range(k + 1), repeat=size))
    found: set[tuple[int, ...]] = set()
    for big in range(k + 1):
        others = [c for c in range(k + 1) if c != big]
        for r in range(q + 1):
            for positions in itertools.combinations(range(size), r):
                for colors in itertools.product(others, repeat=r):
                    f = [big] * size
                    for p, c in zip(positions, colors):
                        f[p] = c
                    found.add(tuple(f))
    return sorted(found)


def coloring_code(coloring: Sequence[int], k: int) -> int:
    """Mixed-radix code of a coloring, base ``k + 1``, first entry most significant."""
    code = 0
    for c in coloring:
        code = code * (k + 1) + c
    return code


def coloring_from_code(code: int, size: int, k: int) -> tuple[int, ...]:
    out = [0] * size
    for i in range(size - 1, -1, -1):
        code, out[i] = divmod(code, k + 1)
    return tuple(out)


def hypergraph_spanning_forest(h: Hypergraph) -> list[int]:
    """Indices of a spanning forest: a set of hyperedges covering every vertex and
    connecting exactly the vertex pairs that ``h`` connects.

    Greedy union-find, trying larger hyperedges first: a hyperedge is kept when
    it covers a new vertex or joins two current components.
    """
    order = sorted(range(len(h.hyperedges)), key=lambda i: (-len(h.hyperedges[i]), i))
    dsu = DisjointSets(h.n)
    covered = [False] * h.n
    chosen = []
    for i in order:
        F = h.hyperedges[i]
        roots = {dsu.find(v) for v in F}
        if len(roots) > 1 or not all(covered[v] for v in F):
            chosen.append(i)
            for v in F:
                covered[v] = True
                dsu.union(F[0], v)
    return sorted(chosen)


def format_graph(g: MultiGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edge_list()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> MultiGraph:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise InputError("empty graph file")
    try:
        header = [int(x) for x in rows[0]]
        body = [tuple(int(x) for x in r) for r in rows[1:]]
    except ValueError as exc:
        raise InputError(f"non-integer token in graph file: {exc}") from None
    if len(header) != 2:
        raise InputError("graph header must be 'n m'")
    n, m = header
    if len(body) != m:
        raise InputError(f"header announces {m} edges but {len(body)} edge lines follow")
    for r in body:
        if len(r) != 2:
            raise InputError(f"edge line must hold two ids, got {r}")
    return MultiGraph(n, body)


def read_graph(path: str) -> MultiGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: MultiGraph, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))
