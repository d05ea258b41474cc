"""Builders: a seed condition from scratch, plus height/support extensions.

`bootstrap` lays out a minimal valid condition over a support: unit words,
one private tree per (pair, slot) holding exactly the two meeting points.
`extend_add_element` splices one new ordinal on top of an existing
condition, growing the height and adding one tree per (old ordinal, slot);
all previous data survives as prefixes, so the result refines the input.
`extend_dense` repeats that until requested height/tree thresholds are
cleared.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from ..errors import ResourceError, UsageError
from ..forest import Forest, Tree
from ..gf2_core import BitVec, unit, zeros
from .condition import Condition

__all__ = ["bootstrap", "extend_add_element", "extend_dense"]


def bootstrap(w: Iterable[int], iota: int = 3) -> Condition:
    """A minimal valid condition over support w (|w| >= 5, iota >= 3).

    Words are unit vectors; each (pair, slot) owns a private tree whose two
    tops are the slot's meeting points: a block unit and its shift across
    the pair's word sum.
    """
    ws = tuple(sorted(set(w)))
    if len(ws) < 5:
        raise UsageError(f"support needs at least 5 ordinals, got {len(ws)}")
    s = len(ws)
    npairs = s * (s - 1) // 2
    n = s + iota * npairs
    eta = {a: unit(n, ws.index(a)) for a in ws}
    h: dict[tuple[int, int], tuple[int, ...]] = {}
    g: dict[tuple[int, int], tuple[BitVec, ...]] = {}
    trees: list[Tree] = []
    for t, (a, b) in enumerate(combinations(ws, 2)):
        slots = tuple(iota * t + i for i in range(iota))
        fwd = tuple(unit(n, s + slot) for slot in slots)
        bwd = tuple(eta[a] ^ eta[b] ^ v for v in fwd)
        h[(a, b)] = h[(b, a)] = slots
        g[(a, b)] = fwd
        g[(b, a)] = bwd
        for i in range(iota):
            trees.append(Tree.from_tops(n, {fwd[i], bwd[i]}))
    forest = Forest(n, tuple(trees))
    return Condition(iota, ws, eta, forest, (n,) * len(trees), h, g)


def extend_add_element(p: Condition, beta: int) -> Condition:
    """Refine p by adjoining the ordinal beta to its support.

    Height grows by N = |w|*iota + 2; all previous words, meeting points
    and trees continue with zero tails.  The new ordinal's word is zero up
    to the old height, then a single 0 and all 1s.  Each (old ordinal a at
    index j, slot i) gets a fresh tree holding the two meeting points of
    the pair (a, beta): complementary 0/1-run tails pivoting at position
    old_n + j*iota + i + 1.
    """
    if not isinstance(beta, int) or beta < 0:
        raise UsageError(f"ordinal must be a non-negative integer, got {beta!r}")
    if beta in p.w:
        raise UsageError(f"ordinal {beta} is already in the support")
    s = len(p.w)
    iota = p.iota
    big = s * iota + 2
    n = p.n + big
    pad = zeros(big)

    eta = {a: p.eta[a].concat(pad) for a in p.w}
    eta[beta] = zeros(p.n + 1).concat(_ones(big - 1))
    h: dict[tuple[int, int], tuple[int, ...]] = {}
    g: dict[tuple[int, int], tuple[BitVec, ...]] = {}
    for pair in p.pairs():
        h[pair] = p.h[pair]
        g[pair] = tuple(v.concat(pad) for v in p.g[pair])
    trees = [Tree.from_tops(n, {t.concat(pad) for t in tr.tops}) for tr in p.forest.trees]
    r = list(p.r)

    for j, a in enumerate(p.w):
        fwd = []
        bwd = []
        slots = []
        for i in range(iota):
            run = j * iota + i
            to_beta = zeros(p.n).concat(unit(big, 0)) ^ _tail_ones(n, big - run - 2)
            to_a = p.eta[a].concat(_ones(run + 2).concat(zeros(big - run - 2)))
            fwd.append(to_beta)
            bwd.append(to_a)
            slots.append(len(trees))
            trees.append(Tree.from_tops(n, {to_beta, to_a}))
            r.append(n)
        h[(a, beta)] = h[(beta, a)] = tuple(slots)
        g[(a, beta)] = tuple(fwd)
        g[(beta, a)] = tuple(bwd)

    return Condition(
        iota, p.w + (beta,), eta, Forest(n, tuple(trees)), tuple(r), h, g
    )


def _ones(k: int) -> BitVec:
    return BitVec(k, (1 << k) - 1)


def _tail_ones(n: int, k: int) -> BitVec:
    """Length-n word whose last k coordinates are 1."""
    return zeros(n - k).concat(_ones(k))


def extend_dense(
    p: Condition,
    beta: int,
    min_n: int,
    min_m: int,
    fresh: Sequence[int],
) -> Condition:
    """Refine p to contain beta with height > min_n and tree count > min_m.

    Extra ordinals are drawn from `fresh` (skipping any already present)
    until both thresholds clear; running out raises a resource error.
    """
    q = p if beta in p.w else extend_add_element(p, beta)
    supply = [x for x in fresh if x not in q.w]
    while q.n <= min_n or q.M <= min_m:
        if not supply:
            raise ResourceError(
                f"fresh ordinals exhausted at height {q.n} with {q.M} trees "
                f"(need height > {min_n} and > {min_m} trees)"
            )
        q = extend_add_element(q, supply.pop(0))
    return q
