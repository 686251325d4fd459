"""Rooted tree decompositions with the highly connected properties.

A decomposition stores one parent pointer and one bag per node, plus the
metadata ``eta``.  Derived sets follow the usual conventions: ``sigma(t)`` is
the adhesion with the parent bag (empty at the root) and ``gamma(t)`` is the
union of the bags in the subtree of ``t``.

Node conditions checked by :func:`validate_highly_connected` (ids as reported):

* ``C1``: ``G[gamma(t) - sigma(t)]`` is connected and its neighbourhood is ``sigma(t)``.
* ``C2``: ``beta(t)`` is ``(eta, k)``-unbreakable in ``G[gamma(t)]``.
* ``C3``: for non-root ``t``, ``sigma(t)`` is ``(2k, k)``-unbreakable in
  ``G[gamma(parent)]``; ``C3-size`` records ``|sigma(t)| > eta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .errors import GateExceeded, InputError
from .graph import DEFAULT_UNBREAKABLE_LIMIT, MultiGraph, connected_components, is_connected, is_unbreakable_set


class TreeDecomposition:
    """Rooted tree of bags; node ``t`` has ``parents[t]`` (``-1`` for the root)."""

    def __init__(self, parents: Sequence[int], bags: Sequence[Sequence[int]], eta: int):
        if len(parents) != len(bags):
            raise InputError("one parent pointer per bag is required")
        self.parents = tuple(int(p) for p in parents)
        self.bags = tuple(tuple(b) for b in bags)
        self.eta = int(eta)
        n_nodes = len(self.parents)
        roots = [t for t, p in enumerate(self.parents) if p == -1]
        if len(roots) != 1:
            raise InputError(f"expected exactly one root, found {len(roots)}")
        for t, p in enumerate(self.parents):
            if p != -1 and not 0 <= p < n_nodes:
                raise InputError(f"node {t} has unknown parent {p}")
        self.root = roots[0]
        children: list[list[int]] = [[] for _ in range(n_nodes)]
        for t, p in enumerate(self.parents):
            if p != -1:
                children[p].append(t)
        self.children = tuple(tuple(c) for c in children)
        order = []
        stack = [self.root]
        while stack:
            t = stack.pop()
            order.append(t)
            stack.extend(self.children[t])
        if len(order) != n_nodes:
            raise InputError("parent pointers do not form a tree")
        self._preorder = tuple(order)

    def __len__(self) -> int:
        return len(self.parents)

    def bag(self, t: int) -> frozenset[int]:
        return frozenset(self.bags[t])

    def postorder(self) -> list[int]:
        return list(reversed(self._preorder))

    def sigma(self, t: int) -> frozenset[int]:
        p = self.parents[t]
        return frozenset() if p == -1 else self.bag(t) & self.bag(p)

    @cached_property
    def _gammas(self) -> tuple[frozenset[int], ...]:
        acc = [set(b) for b in self.bags]
        for t in self.postorder():
            p = self.parents[t]
            if p != -1:
                acc[p] |= acc[t]
        return tuple(frozenset(s) for s in acc)

    def gamma(self, t: int) -> frozenset[int]:
        return self._gammas[t]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TreeDecomposition)
            and self.parents == other.parents
            and self.bags == other.bags
            and self.eta == other.eta
        )

    def __repr__(self) -> str:
        return f"TreeDecomposition(parents={self.parents}, bags={self.bags}, eta={self.eta})"


@dataclass
class ValidationReport:
    violations: list[tuple[int, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, node: int, condition: str, detail: str) -> None:
        self.violations.append((node, condition, detail))


def validate_tree_decomposition(g: MultiGraph, td: TreeDecomposition) -> ValidationReport:
    rep = ValidationReport()
    for t, bag in enumerate(td.bags):
        bad = [v for v in bag if not 0 <= v < g.n]
        if bad:
            rep.add(t, "range", f"bag holds ids outside the graph: {bad}")
        if len(set(bag)) != len(bag):
            rep.add(t, "range", "bag lists a vertex twice")
    if not rep.ok:
        return rep
    for u, v in g.multiplicities():
        if not any(u in b and v in b for b in map(set, td.bags)):
            rep.add(-1, "edge", f"edge {u}-{v} lies in no bag")
    for v in g.vertices():
        holders = {t for t, b in enumerate(td.bags) if v in b}
        if not holders:
            rep.add(-1, "vertex", f"vertex {v} lies in no bag")
            continue
        # The holders form a subtree iff exactly one of them has its parent outside.
        tops = [t for t in holders if td.parents[t] not in holders]
        if len(tops) != 1:
            rep.add(-1, "subtree", f"nodes holding vertex {v} are not connected")
    if not rep.ok:
        return rep
    all_v = set(g.vertices())
    for t in range(len(td)):
        bag = td.bag(t)
        parts = [td.gamma(c) - bag for c in td.children[t]]
        parts.append(all_v - bag - set().union(*parts))
        for comp in connected_components(g, all_v - bag):
            if not any(comp <= part for part in parts):
                rep.add(t, "folklore", f"component {sorted(comp)} of G - bag is split across subtrees")
    return rep


def validate_highly_connected(
    g: MultiGraph, td: TreeDecomposition, k: int, limit: int = DEFAULT_UNBREAKABLE_LIMIT
) -> ValidationReport:
    rep = ValidationReport()
    for t in range(len(td)):
        sig, gam, bag = td.sigma(t), td.gamma(t), td.bag(t)
        inner = gam - sig
        nbhd = {w for v in inner for w in g.neighbors(v)} - inner
        if not inner or not is_connected(g, inner):
            rep.add(t, "C1", "gamma(t) - sigma(t) does not induce a connected graph")
        if nbhd != set(sig):
            rep.add(t, "C1", f"neighbourhood {sorted(nbhd)} differs from sigma {sorted(sig)}")
        sub, ids = g.induced(gam)
        local = {v: i for i, v in enumerate(ids)}
        if not is_unbreakable_set(sub, [local[v] for v in bag], td.eta, k, limit):
            rep.add(t, "C2", f"bag is not ({td.eta},{k})-unbreakable in G[gamma(t)]")
        p = td.parents[t]
        if p == -1:
            continue
        if len(sig) > td.eta:
            rep.add(t, "C3-size", f"|sigma| = {len(sig)} exceeds eta = {td.eta}")
        psub, pids = g.induced(td.gamma(p))
        plocal = {v: i for i, v in enumerate(pids)}
        if not is_unbreakable_set(psub, [plocal[v] for v in sig], 2 * k, k, limit):
            rep.add(t, "C3", f"sigma is not ({2 * k},{k})-unbreakable in G[gamma(parent)]")
    return rep


def trivial_decomposition(g: MultiGraph) -> TreeDecomposition:
    if not is_connected(g):
        raise InputError("the trivial decomposition needs a connected graph")
    return TreeDecomposition([-1], [tuple(g.vertices())], max(g.n, 2))


def split_decomposition(g: MultiGraph) -> TreeDecomposition:
    """Decomposition built by peeling one vertex per node.

    A node owns a connected set ``W`` with neighbourhood ``S``; its bag is
    ``S`` plus one vertex ``v`` of ``W``, and every component of ``W - v``
    becomes a child.  This makes ``C1`` hold by construction.  ``v`` is
    picked among the neighbours of ``S`` to keep the largest child adhesion
    small.  ``eta`` is the largest bag size (at least 2), which makes ``C2``
    vacuous.
    """
    if not is_connected(g) or g.n == 0:
        raise InputError("the split decomposition needs a connected nonempty graph")
    parents: list[int] = []
    bags: list[tuple[int, ...]] = []
    stack: list[tuple[frozenset[int], frozenset[int], int]] = [(frozenset(g.vertices()), frozenset(), -1)]
    while stack:
        W, S, parent = stack.pop()
        candidates = sorted({w for s in S for w in g.neighbors(s)} & W) if S else sorted(W)
        best = None
        for v in candidates:
            kids = connected_components(g, W - {v})
            adh = [{w for u in c for w in g.neighbors(u)} - c for c in kids]
            score = (max((len(a) for a in adh), default=0), len(kids) == 1, v)
            if best is None or score < best[0]:
                best = (score, v, kids, adh)
        _, v, kids, adh = best
        t = len(parents)
        parents.append(parent)
        bags.append(tuple(sorted(S | {v})))
        for comp, a in zip(kids, adh):
            stack.append((frozenset(comp), frozenset(a), t))
    eta = max(2, max(len(b) for b in bags))
    return TreeDecomposition(parents, bags, eta)


def checked_split_decomposition(g: MultiGraph, k: int) -> TreeDecomposition:
    """:func:`split_decomposition` if it validates for budget ``k``, else the trivial one."""
    try:
        td = split_decomposition(g)
        if validate_tree_decomposition(g, td).ok and validate_highly_connected(g, td, k).ok:
            return td
    except GateExceeded:
        pass
    return trivial_decomposition(g)


TdProvider = Callable[[MultiGraph, int], TreeDecomposition]


def trivial_provider(g: MultiGraph, k: int) -> TreeDecomposition:
    return trivial_decomposition(g)


def format_decomposition(td: TreeDecomposition) -> str:
    lines = [f"{len(td)} {td.eta}"]
    for t, (p, bag) in enumerate(zip(td.parents, td.bags)):
        lines.append(" ".join(str(x) for x in (t, p, len(bag), *bag)))
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str) -> TreeDecomposition:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise InputError("empty decomposition file")
    try:
        rows = [[int(x) for x in r] for r in rows]
    except ValueError as exc:
        raise InputError(f"non-integer token in decomposition file: {exc}") from None
    if len(rows[0]) != 2:
        raise InputError("decomposition header must be 'nodes eta'")
    count, eta = rows[0]
    body = rows[1:]
    if len(body) != count:
        raise InputError(f"header announces {count} nodes but {len(body)} node lines follow")
    parents = [0] * count
    bags: list[tuple[int, ...]] = [()] * count
    seen = set()
    for r in body:
        if len(r) < 3 or len(r) != 3 + r[2]:
            raise InputError(f"node line {r} does not match its bag size")
        t = r[0]
        if not 0 <= t < count or t in seen:
            raise InputError(f"node id {t} is out of range or repeated")
        seen.add(t)
        parents[t] = r[1]
        bags[t] = tuple(r[3:])
    return TreeDecomposition(parents, bags, eta)


def read_decomposition(path: str) -> TreeDecomposition:
    with open(path) as fh:
        return parse_decomposition(fh.read())
