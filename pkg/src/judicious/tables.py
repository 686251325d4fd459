"""Binary tables indexed by (mu, l1, l2) stored as Python-int bitsets.

Cell ``(mu, l1, l2)`` lives at bit ``(mu * W1 + l1) * W2 + l2`` with
``W1 = 2*k1 + 1`` and ``W2 = 2*k2 + 1``.  The slack in each budget axis means
adding two in-range cells never carries into the next axis, so the sumset of
two tables is an OR of shifted copies followed by a range mask.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator


class Layout:
    """Bit layout for tables with ``mu <= b``, ``l1 <= k1``, ``l2 <= k2``."""

    __slots__ = ("b", "k1", "k2", "w1", "w2", "row", "valid", "_l1_mask", "_l2_mask", "_keep")

    def __init__(self, b: int, k1: int, k2: int):
        self.b, self.k1, self.k2 = b, k1, k2
        self.w2 = 2 * k2 + 1
        self.w1 = 2 * k1 + 1
        self.row = self.w1 * self.w2
        valid = 0
        for mu in range(b + 1):
            for l1 in range(k1 + 1):
                for l2 in range(k2 + 1):
                    valid |= 1 << self.index(mu, l1, l2)
        self.valid = valid
        # Cells that may be raised by one along each budget axis and stay in range.
        self._l1_mask = sum(1 << self.index(mu, l1, l2) for mu in range(b + 1) for l1 in range(k1) for l2 in range(k2 + 1))
        self._l2_mask = sum(1 << self.index(mu, l1, l2) for mu in range(b + 1) for l1 in range(k1 + 1) for l2 in range(k2))
        self._keep: dict[tuple[int, int, int], int] = {}

    def index(self, mu: int, l1: int, l2: int) -> int:
        return (mu * self.w1 + l1) * self.w2 + l2

    def cell(self, i: int) -> tuple[int, int, int]:
        rest, l2 = divmod(i, self.w2)
        mu, l1 = divmod(rest, self.w1)
        return mu, l1, l2

    def bit(self, mu: int, l1: int, l2: int) -> int:
        if not (0 <= mu <= self.b and 0 <= l1 <= self.k1 and 0 <= l2 <= self.k2):
            return 0
        return 1 << self.index(mu, l1, l2)

    def cells(self, bits: int) -> Iterator[tuple[int, int, int]]:
        for i in iter_bits(bits):
            yield self.cell(i)

    def conv(self, a: int, b: int) -> int:
        """Exact sumset of two in-range tables, truncated to the range."""
        if not a or not b:
            return 0
        if a.bit_count() > b.bit_count():
            a, b = b, a
        out = 0
        for i in iter_bits(a):
            out |= b << i
        return out & self.valid

    def upclose(self, bits: int) -> int:
        """Close a table upward in both budget axes."""
        for _ in range(self.k1):
            nxt = bits | ((bits & self._l1_mask) << self.w2)
            if nxt == bits:
                break
            bits = nxt
        for _ in range(self.k2):
            nxt = bits | ((bits & self._l2_mask) << 1)
            if nxt == bits:
                break
            bits = nxt
        return bits

    def budget_block(self, mu: int) -> int:
        """All cells with the given ``mu`` and any budgets."""
        if not 0 <= mu <= self.b:
            return 0
        out = 0
        for l1 in range(self.k1 + 1):
            for l2 in range(self.k2 + 1):
                out |= 1 << self.index(mu, l1, l2)
        return out

    def shift_down(self, bits: int, dmu: int, dl1: int, dl2: int) -> int:
        """Table whose cell ``c`` holds ``bits[c + d]`` (zero where ``c + d`` is out of range)."""
        keep = self._keep.get((dmu, dl1, dl2))
        if keep is None:
            keep = 0
            for mu in range(dmu, self.b + 1):
                for l1 in range(dl1, self.k1 + 1):
                    for l2 in range(dl2, self.k2 + 1):
                        keep |= 1 << self.index(mu, l1, l2)
            self._keep[(dmu, dl1, dl2)] = keep
        return ((bits & keep) >> self.index(dmu, dl1, dl2)) & self.valid

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Layout) and (self.b, self.k1, self.k2) == (other.b, other.k1, other.k2)

    def __hash__(self) -> int:
        return hash((self.b, self.k1, self.k2))


@lru_cache(maxsize=512)
def layout(b: int, k1: int, k2: int) -> Layout:
    return Layout(b, k1, k2)


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class AJPTable:
    """Binary table over ``mu in 0..b``, ``l1 in 0..k1``, ``l2 in 0..k2``."""

    __slots__ = ("layout", "bits")

    def __init__(self, lay: Layout, bits: int = 0):
        self.layout = lay
        self.bits = bits & lay.valid

    @classmethod
    def from_cells(cls, b: int, k1: int, k2: int, cells) -> "AJPTable":
        lay = layout(b, k1, k2)
        bits = 0
        for mu, l1, l2 in cells:
            bits |= lay.bit(mu, l1, l2)
        return cls(lay, bits)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.layout.b + 1, self.layout.k1 + 1, self.layout.k2 + 1

    def __getitem__(self, key: tuple[int, int, int]) -> bool:
        mu, l1, l2 = key
        lay = self.layout
        if not (0 <= mu <= lay.b and 0 <= l1 <= lay.k1 and 0 <= l2 <= lay.k2):
            raise IndexError(f"cell {key} outside table of shape {self.shape}")
        return bool(self.bits >> lay.index(mu, l1, l2) & 1)

    def cells(self) -> list[tuple[int, int, int]]:
        return sorted(self.layout.cells(self.bits))

    def is_monotone(self) -> bool:
        return self.layout.upclose(self.bits) == self.bits

    def to_nested(self) -> list[list[list[int]]]:
        b, k1, k2 = self.layout.b, self.layout.k1, self.layout.k2
        return [[[int(self[mu, a, c]) for c in range(k2 + 1)] for a in range(k1 + 1)] for mu in range(b + 1)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AJPTable) and self.layout == other.layout and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.layout, self.bits))

    def __repr__(self) -> str:
        return f"AJPTable(shape={self.shape}, ones={self.cells()})"


def relayout(bits: int, src: Layout, dst: Layout) -> int:
    """Copy the in-range cells of ``bits`` from one layout to another."""
    out = 0
    for mu, l1, l2 in src.cells(bits & src.valid):
        out |= dst.bit(mu, l1, l2)
    return out
