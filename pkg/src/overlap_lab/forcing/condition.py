"""Conditions: finitely-supported approximations with a built-in witness catalogue.

A condition bundles, over a set ``w`` of ordinals, a tuple of independent
words ``eta``, a forest of ``M`` trees of height ``n`` with activity floors
``r``, and for every ordered pair of distinct ordinals a tree assignment
``h`` and meeting points ``g``.  Eleven numbered rules govern the bundle;
``validate_condition`` checks them all and reports violations under the
opaque rule codes ``(*)_1`` .. ``(*)_11``.

The witness catalogue ``cal_m`` lists every reduced structure the condition
carries: pick a sub-support ``wstar`` (size >= 5) and a level ``ell`` at or
above all activity floors touched by ``wstar``; restricting the words and
meeting points to ``ell`` yields a structure whenever the restricted words
stay distinct and the meeting points stay collision-free per pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from ..errors import InternalError, UsageError
from ..forest import Forest, Tree
from ..gf2_core import BitVec, is_independent, solve_translate
from ..structures import (
    Diagnostic,
    MStruct,
    essentially_extends,
    essentially_same,
    translate,
)
from .oracle import RankData, RankOracle

__all__ = [
    "Condition",
    "CalEntry",
    "cal_m",
    "validate_condition",
    "leq",
    "leq_failures",
    "capture_translate",
]

PairMap = Mapping[tuple[int, int], tuple]


def _ordered_pairs(w: Sequence[int]) -> list[tuple[int, int]]:
    return [(a, b) for a in w for b in w if a != b]


class Condition:
    """Immutable condition; constructor checks shape, not the numbered rules."""

    __slots__ = ("iota", "w", "eta", "forest", "r", "h", "g", "_cal")

    def __init__(
        self,
        iota: int,
        w: Iterable[int],
        eta: Mapping[int, BitVec],
        forest: Forest,
        r: Sequence[int],
        h: PairMap,
        g: PairMap,
    ):
        if not isinstance(iota, int) or iota < 3:
            raise UsageError(f"iota must be an integer >= 3, got {iota!r}")
        ws = tuple(sorted(w))
        if len(set(ws)) != len(ws) or any(not isinstance(a, int) or a < 0 for a in ws):
            raise UsageError("w must be distinct non-negative integers")
        n = forest.height
        if set(eta) != set(ws):
            raise UsageError("eta must assign a word to exactly the ordinals in w")
        for a, v in eta.items():
            if not isinstance(v, BitVec) or len(v) != n:
                raise UsageError(f"eta[{a}] must be a word of length {n}")
        rs = tuple(r)
        if len(rs) != len(forest.trees) or any(not isinstance(x, int) for x in rs):
            raise UsageError("r must assign an integer to each tree")
        pairs = _ordered_pairs(ws)
        for name, mp in (("h", h), ("g", g)):
            if set(mp) != set(pairs):
                raise UsageError(f"{name} must be total on ordered pairs of w")
        hh: dict[tuple[int, int], tuple[int, ...]] = {}
        gg: dict[tuple[int, int], tuple[BitVec, ...]] = {}
        for p in pairs:
            hv = tuple(h[p])
            gv = tuple(g[p])
            if len(hv) != iota or any(not isinstance(x, int) for x in hv):
                raise UsageError(f"h{p} must be {iota} tree indices")
            if len(gv) != iota or any(
                not isinstance(x, BitVec) or len(x) != n for x in gv
            ):
                raise UsageError(f"g{p} must be {iota} words of length {n}")
            hh[p] = hv
            gg[p] = gv
        self.iota = iota
        self.w = ws
        self.eta = {a: eta[a] for a in ws}
        self.forest = forest
        self.r = rs
        self.h = hh
        self.g = gg
        self._cal: Optional[list["CalEntry"]] = None

    @property
    def n(self) -> int:
        return self.forest.height

    @property
    def M(self) -> int:
        return len(self.forest.trees)

    def pairs(self) -> list[tuple[int, int]]:
        return _ordered_pairs(self.w)

    def key(self):
        return (
            self.iota,
            self.w,
            tuple(self.eta[a] for a in self.w),
            self.forest,
            self.r,
            tuple(sorted(self.h.items())),
            tuple(sorted(self.g.items())),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Condition) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return (
            f"Condition(iota={self.iota}, w={list(self.w)}, n={self.n}, M={self.M})"
        )


@dataclass(frozen=True)
class CalEntry:
    """One catalogue witness: level, sub-support, and the reduced structure."""

    ell: int
    wstar: tuple[int, ...]
    struct: MStruct


def _entry_at(p: Condition, ell: int, wstar: tuple[int, ...]) -> Optional[MStruct]:
    """Reduce p to (ell, wstar); None when the reduction collides."""
    words = {a: p.eta[a].restrict(ell) for a in wstar}
    if len(set(words.values())) != len(wstar):
        return None
    h: dict[tuple[BitVec, BitVec], tuple[int, ...]] = {}
    g: dict[tuple[BitVec, BitVec], tuple[BitVec, ...]] = {}
    for a, b in combinations(wstar, 2):
        fwd = tuple(x.restrict(ell) for x in p.g[(a, b)])
        bwd = tuple(x.restrict(ell) for x in p.g[(b, a)])
        if len(set(fwd) | set(bwd)) != 2 * p.iota:
            return None
        h[(words[a], words[b])] = p.h[(a, b)]
        h[(words[b], words[a])] = p.h[(b, a)]
        g[(words[a], words[b])] = fwd
        g[(words[b], words[a])] = bwd
    return MStruct(ell, p.iota, words.values(), h, g)


def cal_m(p: Condition) -> list[CalEntry]:
    """All catalogue witnesses of p, deterministically ordered.

    Levels run from the largest activity floor touched by the sub-support
    (at least 1) up to the full height; each (level, sub-support) pair that
    reduces cleanly contributes one entry.  Entries are cached on p.
    """
    if p._cal is not None:
        return p._cal
    out: list[CalEntry] = []
    for size in range(5, len(p.w) + 1):
        for wstar in combinations(p.w, size):
            floor = 1
            ok = True
            for a, b in combinations(wstar, 2):
                for m in p.h[(a, b)] + p.h[(b, a)]:
                    if not 0 <= m < p.M:
                        ok = False
                        break
                    floor = max(floor, p.r[m])
                if not ok:
                    break
            if not ok:
                continue
            for ell in range(floor, p.n + 1):
                struct = _entry_at(p, ell, wstar)
                if struct is not None:
                    out.append(CalEntry(ell, wstar, struct))
    out.sort(key=lambda e: (e.ell, e.wstar))
    p._cal = out
    return out


def _rank_table(
    p: Condition, entries: Sequence[CalEntry], oracle: RankOracle
) -> dict[tuple[int, ...], RankData]:
    table: dict[tuple[int, ...], RankData] = {}
    for e in entries:
        if e.wstar not in table:
            table[e.wstar] = oracle.data(e.wstar)
    return table


def _basic_diagnostics(p: Condition) -> list[Diagnostic]:
    """Rules 1-7: support size, independence, forest shape, floors, maps."""
    out: list[Diagnostic] = []
    if len(p.w) < 5:
        out.append(Diagnostic("(*)_1", f"support has {len(p.w)} ordinals, need >= 5"))
    if p.n < 1:
        out.append(Diagnostic("(*)_1", "height must be positive"))
    if p.M < 1:
        out.append(Diagnostic("(*)_1", "at least one tree is required"))
    if not is_independent([p.eta[a] for a in p.w]):
        out.append(Diagnostic("(*)_2", "the words eta are linearly dependent"))
    if not p.forest.disjoint_tops():
        out.append(Diagnostic("(*)_3", "two trees share a top node"))
    for m, rm in enumerate(p.r):
        if not 0 < rm <= p.n:
            out.append(Diagnostic("(*)_4", f"r[{m}] = {rm} outside 1..{p.n}"))
    seen: dict[BitVec, tuple[int, int, int]] = {}
    for a, b in p.pairs():
        for i in range(p.iota):
            hm = p.h[(a, b)][i]
            gv = p.g[(a, b)][i]
            if not 0 <= hm < p.M:
                out.append(
                    Diagnostic("(*)_5", f"h_{i}({a},{b}) = {hm} is not a tree index")
                )
                continue
            if gv not in p.forest.trees[hm].tops:
                out.append(
                    Diagnostic(
                        "(*)_6",
                        f"g_{i}({a},{b}) = {gv.to01()} is not a top of tree {hm}",
                    )
                )
            if a < b:
                gw = p.g[(b, a)][i]
                if p.eta[a] ^ gv != p.eta[b] ^ gw:
                    out.append(
                        Diagnostic(
                            "(*)_6",
                            f"meeting identity fails for pair ({a},{b}) slot {i}",
                        )
                    )
            prev = seen.get(gv)
            if prev is not None:
                out.append(
                    Diagnostic(
                        "(*)_7",
                        f"g_{i}({a},{b}) repeats the value at g_{prev[2]}"
                        f"({prev[0]},{prev[1]})",
                    )
                )
            else:
                seen[gv] = (a, b, i)
    return out


def _catalogue_diagnostics(p: Condition, oracle: RankOracle) -> list[Diagnostic]:
    """Rules 8-11: catalogue completeness, transport, uniqueness, families."""
    out: list[Diagnostic] = []
    entries = cal_m(p)
    full = {e.wstar for e in entries if e.ell == p.n}
    for size in range(5, len(p.w) + 1):
        for wstar in combinations(p.w, size):
            if wstar not in full:
                out.append(
                    Diagnostic(
                        "(*)_8",
                        f"full-height reduction to {list(wstar)} missing from the catalogue",
                    )
                )
    ranks = _rank_table(p, entries, oracle)

    # Rule 9: same-level catalogue entries that agree up to a shift must
    # carry the same rank data, and their witness words must match under
    # that shift.
    by_level: dict[int, list[CalEntry]] = {}
    for e in entries:
        by_level.setdefault(e.ell, []).append(e)
    for ell, group in sorted(by_level.items()):
        usets = [frozenset(e.struct.u) for e in group]
        for i, e0 in enumerate(group):
            for j in range(i, len(group)):
                e1 = group[j]
                anchor = min(usets[j])
                for x in usets[i]:
                    rho = anchor ^ x
                    if i == j and rho.word == 0:
                        continue
                    if frozenset(v ^ rho for v in usets[j]) != usets[i]:
                        continue
                    if not essentially_same(e0.struct, translate(e1.struct, rho)):
                        continue
                    d0, d1 = ranks[e0.wstar], ranks[e1.wstar]
                    tag = f"{list(e0.wstar)} ~ {list(e1.wstar)}+{rho.to01()} at level {ell}"
                    if (d0.value, d0.zeta, d0.k) != (d1.value, d1.zeta, d1.k):
                        out.append(
                            Diagnostic("(*)_9", f"rank data differ for {tag}")
                        )
                        continue
                    a = e0.wstar[d0.k]
                    b = e1.wstar[d1.k]
                    if p.eta[a].restrict(ell) ^ rho != p.eta[b].restrict(ell):
                        out.append(
                            Diagnostic(
                                "(*)_9",
                                f"witness words misaligned for {tag} (position {d0.k})",
                            )
                        )
    # Rule 10: below a dead reduction, every catalogue refinement keeps a
    # single branch over the witness word.
    structs: list[MStruct] = []
    seenk = set()
    for e in entries:
        kk = e.struct.key()
        if kk not in seenk:
            seenk.add(kk)
            structs.append(e.struct)
    for e in entries:
        d = ranks[e.wstar]
        if d.value != -1:
            continue
        word = p.eta[e.wstar[d.k]].restrict(e.ell)
        for nst in structs:
            if nst.ell < e.ell or not essentially_extends(e.struct, nst):
                continue
            hits = sum(1 for v in nst.u if word.is_prefix_of(v))
            if hits != 1:
                out.append(
                    Diagnostic(
                        "(*)_10",
                        f"{hits} branches over {word.to01()} in a refinement of "
                        f"{list(e.wstar)} at level {e.ell}",
                    )
                )
    # Rule 11: any iota pairwise-disjoint top pairs with one common sum must
    # be exactly some pair's meeting family.
    good: dict[BitVec, frozenset[frozenset[BitVec]]] = {}
    for a, b in combinations(p.w, 2):
        s = p.eta[a] ^ p.eta[b]
        fam = frozenset(
            frozenset({p.g[(a, b)][i], p.g[(b, a)][i]}) for i in range(p.iota)
        )
        good[s] = fam
    tops = [t for tree in p.forest.trees for t in tree.tops]
    classes: dict[BitVec, list[frozenset[BitVec]]] = {}
    for x, y in combinations(tops, 2):
        if x != y:
            classes.setdefault(x ^ y, []).append(frozenset({x, y}))
    for s, cls in classes.items():
        if len(cls) < p.iota:
            continue
        fam = good.get(s)
        if fam is None or len(cls) > p.iota or frozenset(cls) != fam:
            out.append(
                Diagnostic(
                    "(*)_11",
                    f"{len(cls)} disjoint top pairs share sum {s.to01()} but do not "
                    "form a meeting family",
                )
            )
    return out


def validate_condition(p: Condition, oracle: RankOracle) -> list[Diagnostic]:
    """All rule violations of p, coded "(*)_1".."(*)_11"; empty means valid.

    Rules 8-11 presume the shape rules 1-7; when any of those fail, the
    report stops there rather than chase consequent breakage.
    """
    out = _basic_diagnostics(p)
    if out:
        return out
    return _catalogue_diagnostics(p, oracle)


_ORDER_CLAUSES = (
    "iota",
    "support",
    "height",
    "trees",
    "tree-restriction",
    "floor",
    "word-prefix",
    "tree-assignment",
    "meeting-prefix",
)


def leq_failures(p: Condition, q: Condition) -> list[str]:
    """Names of order clauses under which q fails to refine p."""
    out: list[str] = []
    if p.iota != q.iota:
        out.append("iota")
        return out
    if not set(p.w) <= set(q.w):
        out.append("support")
    if p.n > q.n:
        out.append("height")
    if p.M > q.M:
        out.append("trees")
    if out:
        return out
    for m in range(p.M):
        if q.forest.trees[m].truncate(p.n) != p.forest.trees[m]:
            out.append("tree-restriction")
            break
    for m in range(p.M):
        if p.r[m] != q.r[m]:
            out.append("floor")
            break
    for a in p.w:
        if q.eta[a].restrict(p.n) != p.eta[a]:
            out.append("word-prefix")
            break
    done = False
    for a, b in p.pairs():
        if done:
            break
        if p.h[(a, b)] != q.h[(a, b)]:
            out.append("tree-assignment")
            done = True
            break
        for i in range(p.iota):
            if q.g[(a, b)][i].restrict(p.n) != p.g[(a, b)][i]:
                out.append("meeting-prefix")
                done = True
                break
    return out


def leq(p: Condition, q: Condition) -> bool:
    """True iff q refines p (q keeps all of p's data as a prefix)."""
    return not leq_failures(p, q)


def capture_translate(p: Condition, m: MStruct) -> tuple[BitVec, CalEntry]:
    """Match a full-height structure over p's forest to a catalogue entry.

    Returns the unique shift rho moving m's branch set into p's words,
    together with the full-height entry it lands on; the shifted structure
    is essentially the entry's.  Presumes p valid; a valid p that fails to
    capture m indicates a broken invariant, not bad input.
    """
    if m.ell != p.n:
        raise UsageError(f"structure level {m.ell} must equal the height {p.n}")
    if m.iota != p.iota:
        raise UsageError("structure and condition disagree on iota")
    for v in m.u:
        if len(v) != p.n:
            raise UsageError("structure words must have the full height")
    rho = solve_translate(list(m.u), [p.eta[a] for a in p.w])
    if rho is None:
        raise InternalError(
            "no shift moves the branch set into the condition's words; "
            "the condition is not valid"
        )
    shifted = {v ^ rho for v in m.u}
    w0 = tuple(a for a in p.w if p.eta[a] in shifted)
    if len(w0) != len(m.u):
        raise InternalError("shifted branch set escapes the condition's words")
    for e in cal_m(p):
        if e.ell == p.n and e.wstar == w0:
            if not essentially_same(translate(m, rho), e.struct):
                raise InternalError(
                    "captured structure is not essentially the catalogue entry"
                )
            return rho, e
    raise InternalError(f"catalogue has no full-height entry for {list(w0)}")
