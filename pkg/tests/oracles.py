"""Definition-level brute-force oracles for the test suite.

Everything here recomputes results the slow, obvious way: full 2^n sweeps,
subset-sum independence, generate-and-test enumeration, and naive recursions
read straight off the defining clauses.  These functions deliberately avoid
the library's clever code paths; they share only the basic value types
(BitVec, MStruct, FiniteModel) so results are comparable.
"""
from __future__ import annotations

import itertools
from typing import Sequence

from overlap_lab.forest import Forest
from overlap_lab.gf2_core import BitVec
from overlap_lab.model_rank import FiniteModel
from overlap_lab.structures import MStruct, extends, validate


# ---------------------------------------------------------------- GF(2)


def independent_by_subset_sums(vecs: Sequence[BitVec]) -> bool:
    """Independence checked by XOR-ing every nonempty subset."""
    words = [v.word for v in vecs]
    for mask in range(1, 1 << len(words)):
        acc = 0
        for i, w in enumerate(words):
            if mask >> i & 1:
                acc ^= w
        if acc == 0:
            return False
    return True


def translate_solutions(a_set: Sequence[BitVec], b_set: Sequence[BitVec]) -> list[int]:
    """All x in 2^n with A + x inside B, by sweeping every candidate x."""
    n = a_set[0].n
    a_words = {v.word for v in a_set}
    b_words = {v.word for v in b_set}
    return [x for x in range(1 << n) if all(a ^ x in b_words for a in a_words)]


# ---------------------------------------------------------------- forests


def overlap_by_sweep(forest: Forest, x: BitVec, y: BitVec) -> int:
    """|(B+x) cap (B+y)| counted by sweeping every z in 2^n."""
    tops = {v.word for v in forest.top_level()}
    return sum(
        1
        for z in range(1 << forest.height)
        if (z ^ x.word) in tops and (z ^ y.word) in tops
    )


# ---------------------------------------------------------------- structures


def structures_by_filter(
    forest: Forest, iota: int, ell: int, max_u: int
) -> set[MStruct]:
    """Generate-and-test enumeration: build every candidate tuple and filter.

    Candidates range over all u subsets of 2^ell and, independently per
    ordered pair and slot, over (level node, tree index) pairs with the tree
    chosen freely; `validate` then throws away everything that breaks a
    clause.  Exponential, so callers keep ell and max_u tiny.
    """
    words = sorted(BitVec(ell, w) for w in range(1 << ell))
    slot_choices = [
        (v, t)
        for v in sorted(forest.nodes_at(ell))
        for t in range(len(forest.trees))
    ]
    out: set[MStruct] = set()
    for size in range(2, max_u + 1):
        for u in itertools.combinations(words, size):
            opairs = [(a, b) for a in u for b in u if a != b]
            per_pair = itertools.product(
                itertools.product(slot_choices, repeat=iota), repeat=len(opairs)
            )
            for combo in per_pair:
                h = {}
                g = {}
                for p, tup in zip(opairs, combo):
                    g[p] = tuple(v for v, _ in tup)
                    h[p] = tuple(t for _, t in tup)
                m = MStruct(ell, iota, u, h, g)
                if not validate(m, forest):
                    out.add(m)
    return out


def ndrk_by_recursion(structs: Sequence[MStruct], height: int) -> list[int]:
    """Naive rank recursion straight off the inductive definition.

    rank >= a+1 at m iff every branch nu of u_m admits some n in the list
    with a strictly larger level, extending m, splitting nu at least twice,
    and itself of rank >= a.  Ranks are bounded by the forest height because
    each step strictly increases the level.
    """
    ext = [
        [
            j
            for j, n in enumerate(structs)
            if n.ell > m.ell and extends(m, n)
        ]
        for m in structs
    ]
    memo: dict[tuple[int, int], bool] = {}

    def splits(nu: BitVec, n: MStruct) -> int:
        return sum(1 for x in n.u if nu.is_prefix_of(x))

    def has(i: int, a: int) -> bool:
        if a == 0:
            return True
        key = (i, a)
        got = memo.get(key)
        if got is not None:
            return got
        ok = all(
            any(splits(nu, structs[j]) >= 2 and has(j, a - 1) for j in ext[i])
            for nu in structs[i].u
        )
        memo[key] = ok
        return ok

    ranks = []
    for i in range(len(structs)):
        r = 0
        while r < height and has(i, r + 1):
            r += 1
        ranks.append(r)
    return ranks


# ---------------------------------------------------------------- model rank


def _literal_survivors(model: FiniteModel, tup: tuple[int, ...], k: int) -> int:
    """Bitmask of values a for which substituting position k preserves the
    truth of every atomic literal that mentions position k."""
    full = (1 << model.size) - 1
    keep = full
    for j in range(len(tup)):
        if j == k:
            continue
        mask = 1 << tup[j]
        keep &= mask if tup[k] == tup[j] else full ^ mask
    for r in model.relations:
        for idx in itertools.product(range(len(tup)), repeat=r.arity):
            if k not in idx:
                continue
            mask = 0
            for a in range(model.size):
                if tuple(a if i == k else tup[i] for i in idx) in r.tuples:
                    mask |= 1 << a
            truth = tuple(tup[i] for i in idx) in r.tuples
            keep &= mask if truth else full ^ mask
    return keep


def _formula_candidates(model: FiniteModel, ws: tuple[int, ...]) -> list[list[int]]:
    out = []
    inside = set(ws)
    for k in range(len(ws)):
        keep = _literal_survivors(model, ws, k)
        out.append([a for a in range(model.size) if keep >> a & 1 and a not in inside])
    return out


def rk_by_formulas(model: FiniteModel, w: Sequence[int], theta: int) -> int:
    """Rank recursion with substitutes filtered literal by literal.

    A substitute a works for position k iff it keeps every atomic literal
    mentioning k at its original truth value; since any quantifier-free
    formula is a boolean combination of atomics, this is exactly the
    every-formula condition of the defining clauses.  Substitutes are fresh
    (outside w); see the library's threshold-semantics note.
    """
    memo: dict[frozenset[int], int] = {}

    def rec(fs: frozenset[int]) -> int:
        got = memo.get(fs)
        if got is not None:
            return got
        ws = tuple(sorted(fs))
        cands = _formula_candidates(model, ws)
        if any(len(c) < theta for c in cands):
            value = -1
        else:
            value = 1 + min(max(rec(fs | {a}) for a in c) for c in cands)
        memo[fs] = value
        return value

    return rec(frozenset(w))


def rk_star_by_formulas(model: FiniteModel, w: Sequence[int], theta: int) -> int:
    """Clique-strengthened rank by brute force over theta-subsets.

    Per position k the family must contain a_k itself, draw the rest from
    the literal-filtered substitutes, and keep every unordered pair's rank
    (on w minus a_k plus the pair) at the target level.
    """
    memo: dict[frozenset[int], int] = {}

    def rec(fs: frozenset[int]) -> int:
        got = memo.get(fs)
        if got is not None:
            return got
        ws = tuple(sorted(fs))
        cands = _formula_candidates(model, ws)
        if any(len(c) < theta for c in cands):
            memo[fs] = -1
            return -1
        per_position = []
        for k, a_k in enumerate(ws):
            base = fs - {a_k}

            def family_exists(alpha: int) -> bool:
                for extra in itertools.combinations(cands[k], theta - 1):
                    fam = (a_k,) + extra
                    if all(
                        rec(base | {x, y}) >= alpha
                        for x, y in itertools.combinations(fam, 2)
                    ):
                        return True
                return False

            best = -1
            while family_exists(best + 1):
                best += 1
            per_position.append(best)
        value = 1 + min(per_position)
        memo[fs] = value
        return value

    return rec(frozenset(w))


def atomic_truths(model: FiniteModel, tup: tuple[int, ...]) -> tuple:
    """Truth values of every atomic formula on the tuple (for type checks)."""
    eqs = tuple(
        tup[i] == tup[j]
        for i in range(len(tup))
        for j in range(i + 1, len(tup))
    )
    rels = tuple(
        tuple(tup[i] for i in idx) in r.tuples
        for r in model.relations
        for idx in itertools.product(range(len(tup)), repeat=r.arity)
    )
    return (eqs, rels)
