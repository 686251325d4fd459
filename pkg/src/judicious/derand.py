"""Deterministic families for the color-coding step.

* ``cover_family(n, y, z)``: subsets S of ``range(n)`` such that for all disjoint
  Y, Z with ``|Y| <= y`` and ``|Z| <= z`` some S contains Y and avoids Z.
* ``perfect_family(n, r)``: functions ``range(n) -> range(r)`` such that every
  r-subset is mapped injectively by some member.
* ``all_functions(k, alpha)``: every function ``range(k) -> 1..alpha``.

Both covering families are built greedily against an explicit list of
constraints, which keeps them exact and reproducible at desk scale.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .errors import GateExceeded

COVER_UNIVERSE_LIMIT = 24
COVER_CONSTRAINT_LIMIT = 200_000
PERFECT_R_LIMIT = 6
PERFECT_CONSTRAINT_LIMIT = 200_000
FUNCTION_LIMIT = 1_000_000


def _bits(members) -> int:
    out = 0
    for x in members:
        out |= 1 << x
    return out


def cover_family(n: int, y: int, z: int) -> list[frozenset[int]]:
    """Cover family over ``range(n)``; see the module docstring.

    Only maximal constraints matter, since any S serving a pair also serves
    every pair it contains.  When ``y + z >= n`` every maximal pair has
    ``Y | Z == range(n)``, so the family is forced to be all sets whose size
    lies in ``[n - z, y]``.  Otherwise the pairs with ``|Y| = y`` and
    ``|Z| = z`` are covered greedily.
    """
    y, z = max(0, y), max(0, z)
    if y + z >= n:
        lo, hi = max(0, n - z), min(y, n)
        return [frozenset(c) for size in range(lo, hi + 1) for c in itertools.combinations(range(n), size)]
    count = comb(n, y) * comb(n - y, z)
    if n > COVER_UNIVERSE_LIMIT or count > COVER_CONSTRAINT_LIMIT:
        # Every y-subset alone already meets every constraint with that Y.
        return [frozenset(c) for c in itertools.combinations(range(n), y)]
    ys, zs = [], []
    for Y in itertools.combinations(range(n), y):
        rest = [i for i in range(n) if i not in Y]
        yb = _bits(Y)
        for Z in itertools.combinations(rest, z):
            ys.append(yb)
            zs.append(_bits(Z))
    Ym = np.array(ys, dtype=np.int64)
    Zm = np.array(zs, dtype=np.int64)
    unmet = np.ones(len(ys), dtype=bool)
    family = []
    while unmet.any():
        first = int(np.argmax(unmet))
        inside, outside = int(Ym[first]), int(Zm[first])
        live = unmet.copy()
        for e in range(n):
            bit = 1 << e
            if (inside | outside) & bit:
                continue
            # Count unmet constraints that stay satisfiable with e inside or outside.
            keep_in = live & ((Zm & bit) == 0)
            keep_out = live & ((Ym & bit) == 0)
            if keep_in.sum() >= keep_out.sum():
                inside |= bit
                live = keep_in
            else:
                outside |= bit
                live = keep_out
        S = inside
        family.append(frozenset(i for i in range(n) if S >> i & 1))
        unmet &= ~(((Ym & ~S) == 0) & ((Zm & S) == 0))
    return family


def perfect_family(n: int, r: int) -> list[tuple[int, ...]]:
    """Perfect hash family from ``range(n)`` to ``range(r)``; see the module docstring.

    For ``r >= n`` a single injective map is returned, which serves every subset.
    """
    if r <= 0:
        return [tuple()] if n == 0 else [tuple([0] * n)]
    if r >= n:
        return [tuple(range(n))]
    if r == 1:
        return [tuple([0] * n)]
    if r > PERFECT_R_LIMIT or comb(n, r) > PERFECT_CONSTRAINT_LIMIT:
        raise GateExceeded(f"perfect family for n={n}, r={r} exceeds the enumeration limit")
    subsets = [frozenset(c) for c in itertools.combinations(range(n), r)]
    unmet = set(range(len(subsets)))
    family = []
    while unmet:
        first = subsets[min(unmet)]
        f = [-1] * n
        for value, e in enumerate(sorted(first)):
            f[e] = value
        for e in range(n):
            if f[e] != -1:
                continue
            best, best_score = 0, -1
            for value in range(r):
                f[e] = value
                score = sum(1 for i in unmet if _could_be_injective(f, subsets[i]))
                if score > best_score:
                    best, best_score = value, score
            f[e] = best
        func = tuple(f)
        family.append(func)
        unmet = {i for i in unmet if len({func[e] for e in subsets[i]}) < r}
    return family


def _could_be_injective(f: list[int], X: frozenset[int]) -> bool:
    seen = set()
    for e in X:
        v = f[e]
        if v == -1:
            continue
        if v in seen:
            return False
        seen.add(v)
    return True


def all_functions(k: int, alpha: int, limit: int = FUNCTION_LIMIT) -> list[tuple[int, ...]]:
    """All functions ``range(k) -> 1..alpha`` as tuples, in lexicographic order."""
    if alpha ** k > limit:
        raise GateExceeded(f"{alpha}^{k} functions exceed the enumeration limit {limit}")
    return list(itertools.product(range(1, alpha + 1), repeat=k))
