"""Twin detection and amalgamation of twin conditions.

Two conditions are twins when they share height, trees and floors, and the
order isomorphism between their supports fixes the common part, transports
words and meeting data exactly, and preserves oracle rank data on every
nonempty sub-support.  Twins admit a common refinement: the amalgam keeps
one copy of the shared data, re-homes the second support's private tail,
and threads all cross pairs through one fresh tree using unit/co-unit
tail blocks so that no unintended coincidences arise.
"""
from __future__ import annotations

from itertools import combinations
from typing import Optional

from ..errors import InternalError, UsageError
from ..forest import Forest, Tree
from ..gf2_core import BitVec, unit, zeros
from .condition import Condition, cal_m
from .oracle import RankOracle

__all__ = ["check_twin", "amalgamate"]


def _ones(k: int) -> BitVec:
    return BitVec(k, (1 << k) - 1)


def check_twin(
    p1: Condition, p2: Condition, oracle: RankOracle
) -> Optional[dict[int, int]]:
    """The order isomorphism w1 -> w2 if the conditions are twins, else None.

    Twins agree on iota, height, trees and floors; the isomorphism fixes
    w1 & w2 pointwise, transports words and meeting data verbatim, and the
    oracle assigns equal (value, zeta, k) to v and its image for every
    nonempty v <= w1.
    """
    if p1.iota != p2.iota or len(p1.w) != len(p2.w):
        return None
    if p1.forest != p2.forest or p1.r != p2.r:
        return None
    pi = dict(zip(p1.w, p2.w))
    common = set(p1.w) & set(p2.w)
    if any(pi[a] != a for a in common):
        return None
    for a in p1.w:
        if p1.eta[a] != p2.eta[pi[a]]:
            return None
    for a, b in p1.pairs():
        img = (pi[a], pi[b])
        if p1.h[(a, b)] != p2.h[img] or p1.g[(a, b)] != p2.g[img]:
            return None
    for size in range(1, len(p1.w) + 1):
        for v in combinations(p1.w, size):
            d1 = oracle.data(v)
            d2 = oracle.data(tuple(pi[x] for x in v))
            if (d1.value, d1.zeta, d1.k) != (d2.value, d2.zeta, d2.k):
                return None
    # Catalogue agreement follows from the data transport; a mismatch here
    # means a broken invariant rather than a legitimate non-twin.
    s1 = {e.struct for e in cal_m(p1)}
    s2 = {e.struct for e in cal_m(p2)}
    if s1 != s2:
        raise InternalError("twin catalogues differ despite matching data")
    return pi


def _zero_pad(p: Condition, k: int) -> Condition:
    """Stretch p by k zero levels; refines p and preserves validity."""
    pad = zeros(k)
    n = p.n + k
    return Condition(
        p.iota,
        p.w,
        {a: v.concat(pad) for a, v in p.eta.items()},
        Forest(
            n,
            tuple(Tree.from_tops(n, {t.concat(pad) for t in tr.tops}) for tr in p.forest.trees),
        ),
        p.r,
        p.h,
        {pair: tuple(v.concat(pad) for v in vs) for pair, vs in p.g.items()},
    )


def amalgamate(p_xi: Condition, p_si: Condition, oracle: RankOracle) -> Condition:
    """The canonical common refinement of two twin conditions.

    Raises a usage error unless the pair are twins.  Identical conditions
    amalgamate to a two-level zero padding of themselves.  Otherwise the
    result has height n1 + N and one extra tree, where
    N = iota*l*(l+k) + iota*l*(l-1)/2 + l + 2 for l private and k shared
    ordinals; all cross-pair meeting points receive pairwise distinct
    tails built from a reserved bijection of unit blocks.
    """
    pi = check_twin(p_xi, p_si, oracle)
    if pi is None:
        raise UsageError("conditions are not twins; cannot amalgamate")
    alphas = sorted(set(p_xi.w) & set(p_si.w))
    betas = [a for a in p_xi.w if a not in p_si.w]
    gammas = [a for a in p_si.w if a not in p_xi.w]
    k = len(alphas)
    ell = len(betas)
    if ell == 0:
        return _zero_pad(p_xi, 2)

    iota = p_xi.iota
    n0 = iota * ell * (ell + k) + iota * ell * (ell - 1) // 2 + 1
    big = n0 + ell + 1
    n = p_xi.n + big

    # Reserved tail blocks: one unit position per (shared x private x slot),
    # (ordered private pair x slot) and (private x private x slot) triple.
    theta: dict[tuple[int, int, int, int], int] = {}
    for a in range(k):
        for c in range(ell):
            for i in range(iota):
                theta[(a, c, i, 0)] = len(theta)
    for b, c in combinations(range(ell), 2):
        for i in range(iota):
            theta[(b, c, i, 1)] = len(theta)
    for b in range(ell):
        for c in range(ell):
            for i in range(iota):
                theta[(b, c, i, 2)] = len(theta)
    if len(theta) != n0 - 1:
        raise InternalError(f"block bijection covers {len(theta)} != {n0 - 1} slots")

    def nu(d: int) -> BitVec:
        return unit(n0, d)

    def nu_star(d: int) -> BitVec:
        return _ones(n0) ^ unit(n0, d)

    def suffix(c: int) -> BitVec:
        return zeros(c).concat(_ones(ell - c))

    one = unit(1, 0)
    pad = zeros(big)

    eta = {a: p_xi.eta[a].concat(pad) for a in p_xi.w}
    for c, gc in enumerate(gammas):
        eta[gc] = p_si.eta[gc].concat(zeros(1)).concat(_ones(n0)).concat(suffix(c))

    h: dict[tuple[int, int], tuple[int, ...]] = {}
    g: dict[tuple[int, int], tuple[BitVec, ...]] = {}
    fresh_tree = p_xi.M

    for pair in p_xi.pairs():
        h[pair] = p_xi.h[pair]
        g[pair] = tuple(v.concat(pad) for v in p_xi.g[pair])

    for a, aa in enumerate(alphas):
        for c, gc in enumerate(gammas):
            h[(aa, gc)] = p_si.h[(aa, gc)]
            h[(gc, aa)] = p_si.h[(gc, aa)]
            fwd, bwd = [], []
            for i in range(iota):
                d = theta[(a, c, i, 0)]
                fwd.append(
                    p_si.g[(aa, gc)][i].concat(one).concat(nu(d)).concat(zeros(ell))
                )
                bwd.append(
                    p_si.g[(gc, aa)][i].concat(one).concat(nu_star(d)).concat(suffix(c))
                )
            g[(aa, gc)] = tuple(fwd)
            g[(gc, aa)] = tuple(bwd)

    for b, c in combinations(range(ell), 2):
        gb, gc = gammas[b], gammas[c]
        h[(gb, gc)] = p_si.h[(gb, gc)]
        h[(gc, gb)] = p_si.h[(gc, gb)]
        fwd, bwd = [], []
        for i in range(iota):
            d = theta[(b, c, i, 1)]
            fwd.append(p_si.g[(gb, gc)][i].concat(one).concat(nu(d)).concat(suffix(b)))
            bwd.append(p_si.g[(gc, gb)][i].concat(one).concat(nu(d)).concat(suffix(c)))
        g[(gb, gc)] = tuple(fwd)
        g[(gc, gb)] = tuple(bwd)

    for b, bb in enumerate(betas):
        for c, gc in enumerate(gammas):
            slots = (fresh_tree,) * iota
            h[(bb, gc)] = h[(gc, bb)] = slots
            fwd, bwd = [], []
            for i in range(iota):
                d = theta[(b, c, i, 2)]
                if b != c:
                    head_f = p_xi.g[(bb, betas[c])][i]
                    head_b = p_si.g[(gc, gammas[b])][i]
                else:
                    head_f = p_xi.eta[bb]
                    head_b = p_si.eta[gc]
                fwd.append(head_f.concat(one).concat(nu(d)).concat(suffix(c)))
                bwd.append(head_b.concat(one).concat(nu_star(d)).concat(zeros(ell)))
            g[(bb, gc)] = tuple(fwd)
            g[(gc, bb)] = tuple(bwd)

    by_tree: dict[int, set[BitVec]] = {m: set() for m in range(p_xi.M + 1)}
    for pair, vals in g.items():
        for i, v in enumerate(vals):
            by_tree[h[pair][i]].add(v)
    trees = [
        Tree.from_tops(n, {t.concat(pad) for t in tr.tops} | by_tree[m])
        for m, tr in enumerate(p_xi.forest.trees)
    ]
    if not by_tree[fresh_tree]:
        raise InternalError("cross tree received no meeting points")
    trees.append(Tree.from_tops(n, by_tree[fresh_tree]))

    return Condition(
        iota,
        sorted(set(p_xi.w) | set(p_si.w)),
        eta,
        Forest(n, tuple(trees)),
        p_xi.r + (n,),
        h,
        g,
    )
