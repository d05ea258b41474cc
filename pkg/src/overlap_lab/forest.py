"""Uniform-height binary-word trees, forests of them, and overlap counts.

A tree of height n is the set of all prefixes of its top-level nodes (its
"tops", all of length exactly n), so every maximal node has length n and the
set is closed under initial segments by construction.  A forest is an ordered
list of same-height trees; the order matters because other components refer
to trees by index.

Depth-n semantics: everything here is about the finite approximation at one
height.  `overlap` counts the z with both z+x and z+y in the forest's top
level, computed as |(tops + x) ∩ (tops + y)| (the z-sweep definition agrees:
z witnesses membership iff z lands in both translated top sets).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import UsageError
from .gf2_core import BitVec

__all__ = ["Tree", "Forest", "overlap", "stnd_at_depth"]


@dataclass(frozen=True, slots=True)
class Tree:
    """Prefix closure of a nonempty set of height-long binary words."""

    height: int
    tops: frozenset[BitVec]

    def __post_init__(self) -> None:
        if not self.tops:
            raise UsageError("a tree needs at least one top node")
        if any(t.n != self.height for t in self.tops):
            raise UsageError("every top node must have length equal to the height")

    @classmethod
    def from_tops(cls, height: int, tops: Iterable[BitVec]) -> "Tree":
        return cls(height, frozenset(tops))

    def contains(self, node: BitVec) -> bool:
        return node.n <= self.height and any(node.is_prefix_of(t) for t in self.tops)

    def nodes_at(self, level: int) -> frozenset[BitVec]:
        """All nodes of the given length (prefixes of tops)."""
        if not 0 <= level <= self.height:
            raise UsageError(f"level {level} outside [0, {self.height}]")
        return frozenset(t.restrict(level) for t in self.tops)

    def nodes(self) -> Iterator[BitVec]:
        """Every node, level by level (roots first)."""
        for level in range(self.height + 1):
            yield from sorted(self.nodes_at(level))

    def truncate(self, height: int) -> "Tree":
        return Tree(height, self.nodes_at(height))


@dataclass(frozen=True, slots=True)
class Forest:
    height: int
    trees: tuple[Tree, ...]

    def __post_init__(self) -> None:
        if not self.trees:
            raise UsageError("a forest needs at least one tree")
        if any(t.height != self.height for t in self.trees):
            raise UsageError("all trees in a forest must share its height")

    def top_level(self) -> frozenset[BitVec]:
        """Union of all trees' top nodes."""
        out: set[BitVec] = set()
        for t in self.trees:
            out |= t.tops
        return frozenset(out)

    def disjoint_tops(self) -> bool:
        """True iff no top node belongs to two trees."""
        total = sum(len(t.tops) for t in self.trees)
        return len(self.top_level()) == total

    def nodes_at(self, level: int) -> frozenset[BitVec]:
        out: set[BitVec] = set()
        for t in self.trees:
            out |= t.nodes_at(level)
        return frozenset(out)

    def trees_containing(self, node: BitVec) -> tuple[int, ...]:
        return tuple(m for m, t in enumerate(self.trees) if t.contains(node))

    def truncate(self, height: int) -> "Forest":
        if not 0 <= height <= self.height:
            raise UsageError(f"cannot truncate height-{self.height} forest to {height}")
        return Forest(height, tuple(t.truncate(height) for t in self.trees))

    def extends(self, other: "Forest") -> bool:
        """True iff this forest grows `other`: same trees below other's height.

        Tree m of the smaller forest must equal tree m of this one cut at the
        smaller height; extra trees here are fine.
        """
        if other.height > self.height or len(other.trees) > len(self.trees):
            return False
        for small, big in zip(other.trees, self.trees):
            if small.tops != frozenset(t.restrict(other.height) for t in big.tops):
                return False
        return True


def _check_point(forest: Forest, v: BitVec, name: str) -> None:
    if v.n != forest.height:
        raise UsageError(f"{name} must have length {forest.height}, got {v.n}")


def overlap(forest: Forest, x: BitVec, y: BitVec) -> int:
    """Number of z with z+x and z+y both in the forest's top level."""
    _check_point(forest, x, "x")
    _check_point(forest, y, "y")
    tops = {t.word for t in forest.top_level()}
    shifted_x = {w ^ x.word for w in tops}
    shifted_y = {w ^ y.word for w in tops}
    return len(shifted_x & shifted_y)


def stnd_at_depth(forest: Forest, k: int, x: BitVec, y: BitVec) -> bool:
    """True iff at least k distinct z have z+x and z+y in the top level.

    Early-exit witness scan over candidates z = top + x; equivalent to
    overlap(forest, x, y) >= k but computed by search, not by counting.
    """
    if k < 0:
        raise UsageError("k must be >= 0")
    _check_point(forest, x, "x")
    _check_point(forest, y, "y")
    if k == 0:
        return True
    tops = {t.word for t in forest.top_level()}
    found = 0
    seen: set[int] = set()
    for w in tops:
        z = w ^ x.word
        if z in seen:
            continue
        seen.add(z)
        if (z ^ y.word) in tops:
            found += 1
            if found >= k:
                return True
    return False
