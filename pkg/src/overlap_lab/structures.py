"""Level-anchored overlap structures on a forest and their five relations.

A structure fixes a level ell, a set u of at least two level-ell nodes, and
for every ordered pair of distinct members of u an iota-tuple of "meeting
points" g_i together with tree indices h_i saying which tree each meeting
point lives in.  The validity clauses (checked by `validate`, reported under
the rule codes 3.4(a)-(e) and 4.1(1)) are:

  3.4(a)  0 < ell and |u| >= 2;
  3.4(c)  g_i(eta,nu) is a level-ell node of tree h_i(eta,nu);
  3.4(d)  eta + g_i(eta,nu) == nu + g_i(nu,eta)   (the meeting identity);
  3.4(e)  within one pair, the 2*iota values g_i(eta,nu), g_i(nu,eta) are
          distinct;
  4.1(1)  ell <= forest height and every h value indexes an existing tree.

The index i is part of a structure's identity: permuting the i-slots yields a
different (though "essentially the same") structure.
"""
from __future__ import annotations

import itertools
from typing import Callable, Iterator, Mapping, Sequence

from .errors import UsageError
from .forest import Forest
from .gf2_core import BitVec

__all__ = [
    "MStruct",
    "Diagnostic",
    "validate",
    "translate",
    "extends",
    "essentially_same",
    "essentially_extends",
    "restrict",
    "enumerate_structures",
]

Pair = tuple[BitVec, BitVec]


class Diagnostic:
    """One validation failure: a rule code plus a human-readable message."""

    __slots__ = ("code", "message")

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message

    def __repr__(self) -> str:
        return f"Diagnostic({self.code}: {self.message})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Diagnostic)
            and (self.code, self.message) == (other.code, other.message)
        )

    def __hash__(self) -> int:
        return hash((self.code, self.message))


def _ordered_pairs(u: Sequence[BitVec]) -> Iterator[Pair]:
    for x in u:
        for y in u:
            if x != y:
                yield (x, y)


class MStruct:
    """Immutable structure (ell, iota, u, h, g); maps are total on u-pairs."""

    __slots__ = ("ell", "iota", "u", "h", "g", "_key")

    def __init__(
        self,
        ell: int,
        iota: int,
        u: Sequence[BitVec],
        h: Mapping[Pair, Sequence[int]],
        g: Mapping[Pair, Sequence[BitVec]],
    ):
        if iota < 1:
            raise UsageError("iota must be >= 1")
        uu = tuple(sorted(set(u)))
        if any(x.n != ell for x in uu):
            raise UsageError("every member of u must have length ell")
        pairs = list(_ordered_pairs(uu))
        hh: dict[Pair, tuple[int, ...]] = {}
        gg: dict[Pair, tuple[BitVec, ...]] = {}
        for p in pairs:
            if p not in h or p not in g:
                raise UsageError(f"maps must cover every ordered pair; missing {p}")
            hv = tuple(h[p])
            gv = tuple(g[p])
            if len(hv) != iota or len(gv) != iota:
                raise UsageError(f"h/g values at {p} must be iota-tuples")
            if any(not isinstance(t, int) or t < 0 for t in hv):
                raise UsageError("h values must be natural numbers")
            if any(v.n != ell for v in gv):
                raise UsageError("g values must have length ell")
            hh[p] = hv
            gg[p] = gv
        extra = set(h) - set(pairs)
        if extra or set(g) - set(pairs):
            raise UsageError("maps must be defined exactly on the ordered pairs of u")
        self.ell = ell
        self.iota = iota
        self.u = uu
        self.h = hh
        self.g = gg
        self._key = (
            ell,
            iota,
            tuple(x.word for x in uu),
            tuple(
                (p[0].word, p[1].word, hh[p], tuple(v.word for v in gg[p]))
                for p in sorted(pairs)
            ),
        )

    def key(self) -> tuple:
        """Canonical hashable identity (used for dedup and JSON ordering)."""
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MStruct) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"MStruct(ell={self.ell}, iota={self.iota}, |u|={len(self.u)})"

    def pairs(self) -> Iterator[Pair]:
        return _ordered_pairs(self.u)

    def pair_family(self, x: BitVec, y: BitVec) -> frozenset[frozenset[BitVec]]:
        """The unordered meeting-point family {{g_i(x,y), g_i(y,x)} : i}."""
        fwd = self.g[(x, y)]
        bwd = self.g[(y, x)]
        return frozenset(frozenset((fwd[i], bwd[i])) for i in range(self.iota))


def validate(m: MStruct, forest: Forest) -> list[Diagnostic]:
    """Check the validity clauses of m against the forest; empty means valid."""
    out: list[Diagnostic] = []
    if not (0 < m.ell):
        out.append(Diagnostic("3.4(a)", f"level must be positive, got {m.ell}"))
    if len(m.u) < 2:
        out.append(Diagnostic("3.4(a)", f"|u| must be >= 2, got {len(m.u)}"))
    if m.ell > forest.height:
        out.append(
            Diagnostic("4.1(1)", f"level {m.ell} exceeds forest height {forest.height}")
        )
        return out  # node lookups below would be meaningless
    ntrees = len(forest.trees)
    for x, y in m.pairs():
        hv = m.h[(x, y)]
        gv = m.g[(x, y)]
        for i in range(m.iota):
            if hv[i] >= ntrees:
                out.append(
                    Diagnostic(
                        "4.1(1)",
                        f"h_{i}({x.to01()},{y.to01()}) = {hv[i]} "
                        f"but the forest has {ntrees} trees",
                    )
                )
            elif not forest.trees[hv[i]].contains(gv[i]):
                out.append(
                    Diagnostic(
                        "3.4(c)",
                        f"g_{i}({x.to01()},{y.to01()}) = {gv[i].to01()} "
                        f"is not a node of tree {hv[i]}",
                    )
                )
        gv_back = m.g[(y, x)]
        for i in range(m.iota):
            if x ^ gv[i] != y ^ gv_back[i]:
                out.append(
                    Diagnostic(
                        "3.4(d)",
                        f"meeting identity fails at i={i} for "
                        f"({x.to01()},{y.to01()})",
                    )
                )
    for idx in range(len(m.u)):
        for jdx in range(idx + 1, len(m.u)):
            x, y = m.u[idx], m.u[jdx]
            vals = list(m.g[(x, y)]) + list(m.g[(y, x)])
            if len(set(vals)) != len(vals):
                out.append(
                    Diagnostic(
                        "3.4(e)",
                        f"repeated meeting point on pair ({x.to01()},{y.to01()})",
                    )
                )
    return out


def translate(m: MStruct, rho: BitVec) -> MStruct:
    """Shift u by rho (restricted to m's level); meeting data is unchanged."""
    if rho.n < m.ell:
        raise UsageError(f"translation vector must have length >= {m.ell}")
    r = rho.restrict(m.ell)
    new_h = {(x ^ r, y ^ r): m.h[(x, y)] for (x, y) in m.pairs()}
    new_g = {(x ^ r, y ^ r): m.g[(x, y)] for (x, y) in m.pairs()}
    return MStruct(m.ell, m.iota, [x ^ r for x in m.u], new_h, new_g)


def _check_comparable(m: MStruct, n: MStruct) -> None:
    if m.iota != n.iota:
        raise UsageError(f"iota mismatch: {m.iota} vs {n.iota}")


def extends(m: MStruct, n: MStruct) -> bool:
    """True iff n extends m: levels grow, u restricts, maps agree slotwise."""
    _check_comparable(m, n)
    if m.ell > n.ell:
        return False
    if set(m.u) != {x.restrict(m.ell) for x in n.u}:
        return False
    for x, y in n.pairs():
        xr, yr = x.restrict(m.ell), y.restrict(m.ell)
        if xr == yr:
            continue
        if m.h[(xr, yr)] != n.h[(x, y)]:
            return False
        if any(
            m.g[(xr, yr)][i] != n.g[(x, y)][i].restrict(m.ell) for i in range(m.iota)
        ):
            return False
    return True


def _families_match(
    m: MStruct,
    n: MStruct,
    mpair: Pair,
    npair: Pair,
    cut: Callable[[BitVec], BitVec],
) -> bool:
    """Unordered-family equality plus the h-follows-g conditions.

    Compares m's family at mpair with n's family at npair after applying
    `cut` to n's meeting points (identity for same-level comparison,
    restriction for essential extension).
    """
    mx, my = mpair
    nx, ny = npair
    m_fwd, m_bwd = m.g[(mx, my)], m.g[(my, mx)]
    n_fwd = [cut(v) for v in n.g[(nx, ny)]]
    n_bwd = [cut(v) for v in n.g[(ny, nx)]]
    fam_m = {frozenset((m_fwd[i], m_bwd[i])) for i in range(m.iota)}
    fam_n = {frozenset((n_fwd[j], n_bwd[j])) for j in range(n.iota)}
    if fam_m != fam_n:
        return False
    # h must follow g: matching meeting points carry the same tree index.
    for i in range(m.iota):
        for j in range(n.iota):
            if m_fwd[i] == n_fwd[j] and m.h[(mx, my)][i] != n.h[(nx, ny)][j]:
                return False
            if m_fwd[i] == n_bwd[j] and m.h[(mx, my)][i] != n.h[(ny, nx)][j]:
                return False
            if m_bwd[i] == n_fwd[j] and m.h[(my, mx)][i] != n.h[(nx, ny)][j]:
                return False
            if m_bwd[i] == n_bwd[j] and m.h[(my, mx)][i] != n.h[(ny, nx)][j]:
                return False
    return True


def essentially_same(m: MStruct, n: MStruct) -> bool:
    """Same level and u; meeting-point families agree up to re-indexing."""
    _check_comparable(m, n)
    if m.ell != n.ell or m.u != n.u:
        return False
    ident = lambda v: v
    for x, y in m.pairs():
        if not _families_match(m, n, (x, y), (x, y), ident):
            return False
    return True


def essentially_extends(m: MStruct, n: MStruct) -> bool:
    """n essentially extends m: like `extends` but only up to re-indexing."""
    _check_comparable(m, n)
    if m.ell > n.ell:
        return False
    if set(m.u) != {x.restrict(m.ell) for x in n.u}:
        return False
    cut = lambda v: v.restrict(m.ell)
    for x, y in n.pairs():
        xr, yr = x.restrict(m.ell), y.restrict(m.ell)
        if xr == yr:
            continue
        if not _families_match(m, n, (xr, yr), (x, y), cut):
            return False
    return True


def restrict(m: MStruct, u2: Sequence[BitVec]) -> MStruct:
    """Throw away branches outside u2 (|u2| >= 2 required), same level."""
    u2s = set(u2)
    if not u2s <= set(m.u):
        raise UsageError("u2 must be a subset of the structure's u")
    if len(u2s) < 2:
        raise UsageError("restriction needs at least 2 surviving branches")
    keep = list(_ordered_pairs(sorted(u2s)))
    return MStruct(
        m.ell,
        m.iota,
        sorted(u2s),
        {p: m.h[p] for p in keep},
        {p: m.g[p] for p in keep},
    )


def enumerate_structures(
    forest: Forest, iota: int, ell: int, max_u: int
) -> Iterator[MStruct]:
    """Yield every valid structure at level ell with 2 <= |u| <= max_u.

    u ranges over arbitrary length-ell words -- only the meeting points are
    tied to the trees -- so the stream really is the full bounded slice of
    the structure set.  Deterministic order: u-sets lexicographically, then
    per-pair choices in sorted order.  For each unordered pair only the
    forward data is chosen; the backward meeting point is forced by the
    meeting identity (g_i(nu,eta) = g_i(eta,nu) + eta + nu) and must itself
    be a level node of its tree.
    """
    if not 0 < ell <= forest.height:
        raise UsageError(f"level must be in [1, {forest.height}]")
    if max_u < 2:
        raise UsageError("max_u must be >= 2")
    level_words = [BitVec(ell, w) for w in range(1 << ell)]
    level_words.sort()
    level_nodes = sorted(forest.nodes_at(ell))
    in_trees = {v: forest.trees_containing(v) for v in level_nodes}
    node_set = set(level_nodes)

    def pair_options(x: BitVec, y: BitVec) -> list[tuple[BitVec, BitVec, int, int]]:
        s = x ^ y
        opts = []
        for fwd in level_nodes:
            bwd = fwd ^ s
            if bwd not in node_set:
                continue
            for hf in in_trees[fwd]:
                for hb in in_trees[bwd]:
                    opts.append((fwd, bwd, hf, hb))
        return opts

    for size in range(2, max_u + 1):
        for u in itertools.combinations(level_words, size):
            upairs = list(itertools.combinations(u, 2))
            per_pair_choices = []
            for x, y in upairs:
                opts = pair_options(x, y)
                # ordered iota-tuples of options with all 2*iota points distinct
                chosen: list[tuple] = []

                def grow(prefix: tuple, used: frozenset):
                    if len(prefix) == iota:
                        chosen.append(prefix)
                        return
                    for opt in opts:
                        if opt[0] in used or opt[1] in used:
                            continue
                        grow(prefix + (opt,), used | {opt[0], opt[1]})

                grow((), frozenset())
                per_pair_choices.append(chosen)
            if any(not c for c in per_pair_choices):
                continue
            for combo in itertools.product(*per_pair_choices):
                h: dict[Pair, tuple[int, ...]] = {}
                g: dict[Pair, tuple[BitVec, ...]] = {}
                for (x, y), tup in zip(upairs, combo):
                    h[(x, y)] = tuple(opt[2] for opt in tup)
                    h[(y, x)] = tuple(opt[3] for opt in tup)
                    g[(x, y)] = tuple(opt[0] for opt in tup)
                    g[(y, x)] = tuple(opt[1] for opt in tup)
                yield MStruct(ell, iota, u, h, g)
