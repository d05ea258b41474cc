"""Branching rank of structures over a forest, bounded by the forest height.

ndrk is defined by a decreasing fixpoint over the finite poset of all valid
structures with |u| <= max_u: every structure has rank >= 0; a structure
keeps rank >= a+1 while every branch nu of its u admits a strictly-higher
extension, still alive at rank >= a, that splits nu into at least two
branches.  The fixpoint terminates because witnesses live at strictly larger
levels, so the set of survivors must shrink to empty.

A "perfect witness chain" is a sequence of structures, each extending the
previous one at a strictly larger level and splitting EVERY branch in at
least two; `extract_perfect_witness` turns such a chain into a branching tree
plus per-pair overlap certificates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InternalError, UsageError
from .forest import Forest, overlap
from .gf2_core import BitVec
from .structures import Diagnostic, MStruct, enumerate_structures, extends, validate

__all__ = [
    "RankResult",
    "ndrk_bounded",
    "ndrk_sup",
    "structure_poset",
    "ndrk_table",
    "ChainWitness",
    "check_chain",
    "doubling_chain",
    "WitnessCertificate",
    "extract_perfect_witness",
]


@dataclass(frozen=True)
class RankResult:
    """Rank value plus one witness map per rank step.

    witnesses[j] maps each branch nu of u to a structure of rank >= j that
    extends the ranked structure and splits nu; the list has `value` entries.
    """

    value: int
    witnesses: tuple[Mapping[BitVec, MStruct], ...]


_POSET_CACHE: dict[tuple[Forest, int, int], tuple[list[MStruct], dict]] = {}
_RANK_CACHE: dict[tuple[Forest, int, int], tuple] = {}


def structure_poset(forest: Forest, iota: int, max_u: int) -> list[MStruct]:
    """All valid structures over the forest at any level, |u| <= max_u."""
    return _poset(forest, iota, max_u)[0]


def _poset(forest: Forest, iota: int, max_u: int):
    key = (forest, iota, max_u)
    if key in _POSET_CACHE:
        return _POSET_CACHE[key]
    structs: list[MStruct] = []
    for ell in range(1, forest.height + 1):
        structs.extend(enumerate_structures(forest, iota, ell, max_u))
    index = {m.key(): i for i, m in enumerate(structs)}
    if len(index) != len(structs):
        raise InternalError("structure enumeration produced duplicates")
    _POSET_CACHE[key] = (structs, index)
    return structs, index


def _rank_data(forest: Forest, iota: int, max_u: int):
    """Fixpoint ranks, per-step witness indices, and the structure list."""
    cache_key = (forest, iota, max_u)
    if cache_key in _RANK_CACHE:
        return _RANK_CACHE[cache_key]
    structs, index = _poset(forest, iota, max_u)
    # Candidate extension edges, prefiltered by restricted-u equality.
    by_level_u: dict[tuple[int, frozenset[int]], list[int]] = {}
    for i, m in enumerate(structs):
        by_level_u.setdefault((m.ell, frozenset(x.word for x in m.u)), []).append(i)
    edges: dict[int, list[tuple[int, dict[int, int]]]] = {i: [] for i in range(len(structs))}
    for j, n in enumerate(structs):
        for ell in range(1, n.ell):
            counts: dict[int, int] = {}
            for x in n.u:
                w = x.restrict(ell).word
                counts[w] = counts.get(w, 0) + 1
            cands = by_level_u.get((ell, frozenset(counts)), [])
            for i in cands:
                if extends(structs[i], n):
                    edges[i].append((j, counts))
    alive = set(range(len(structs)))
    ranks = [0] * len(structs)
    wit: list[list[dict[int, int]]] = [[] for _ in structs]
    while alive:
        survivors = set()
        step_wit: dict[int, dict[int, int]] = {}
        for i in alive:
            m = structs[i]
            found: dict[int, int] = {}
            for nu in m.u:
                picked = -1
                for j, counts in edges[i]:
                    if j in alive and counts.get(nu.word, 0) >= 2:
                        picked = j
                        break
                if picked < 0:
                    break
                found[nu.word] = picked
            else:
                survivors.add(i)
                step_wit[i] = found
        if not survivors:
            break
        for i in survivors:
            ranks[i] += 1
            wit[i].append(step_wit[i])
        alive = survivors
    _RANK_CACHE[cache_key] = (structs, index, ranks, wit, edges)
    return _RANK_CACHE[cache_key]


def ndrk_bounded(m: MStruct, forest: Forest, max_u: int) -> RankResult:
    """Rank of m in the poset of valid structures with |u| <= max_u."""
    diags = validate(m, forest)
    if diags:
        raise UsageError(f"structure is not valid over the forest: {diags[0]}")
    if len(m.u) > max_u:
        raise UsageError(f"|u| = {len(m.u)} exceeds max_u = {max_u}")
    structs, index, ranks, wit, _ = _rank_data(forest, m.iota, max_u)
    i = index.get(m.key())
    if i is None:
        raise InternalError("valid structure missing from its own enumeration")
    witnesses = tuple(
        {BitVec(m.ell, w): structs[j] for w, j in step.items()} for step in wit[i]
    )
    return RankResult(ranks[i], witnesses)


def ndrk_sup(forest: Forest, iota: int, max_u: int) -> int:
    """sup of (rank + 1) over all structures; 0 when none exist."""
    structs, _, ranks, _, _ = _rank_data(forest, iota, max_u)
    return max(ranks, default=-1) + 1 if structs else 0


def ndrk_table(forest: Forest, iota: int, max_u: int) -> dict[tuple, int]:
    """Canonical-key -> rank for every structure in the bounded poset."""
    structs, _, ranks, _, _ = _rank_data(forest, iota, max_u)
    return {m.key(): r for m, r in zip(structs, ranks)}


def doubling_chain(forest: Forest, iota: int, max_u: int) -> list[MStruct]:
    """Longest chain in which every branch splits >= 2 at every step.

    Unlike the rank (which may pick a different extension per branch), a
    chain element must double all branches simultaneously, so the longest
    chain can be shorter than the rank suggests.  Empty poset gives [].
    """
    structs, _, _, _, edges = _rank_data(forest, iota, max_u)
    if not structs:
        return []
    succs: list[list[int]] = []
    for i, m in enumerate(structs):
        words = [x.word for x in m.u]
        succs.append(
            [j for j, counts in edges[i] if all(counts.get(w, 0) >= 2 for w in words)]
        )
    best: dict[int, tuple[int, int]] = {}

    def rec(i: int) -> tuple[int, int]:
        if i in best:
            return best[i]
        choice = (0, -1)
        for j in succs[i]:
            cand = (rec(j)[0] + 1, j)
            if cand[0] > choice[0]:
                choice = cand
        best[i] = choice
        return choice

    start = max(range(len(structs)), key=lambda i: rec(i)[0])
    out = [structs[start]]
    i = start
    while best[i][1] >= 0:
        i = best[i][1]
        out.append(structs[i])
    return out


@dataclass(frozen=True)
class ChainWitness:
    """A candidate perfect witness chain over a forest."""

    forest: Forest
    chain: tuple[MStruct, ...]


def check_chain(cw: ChainWitness) -> list[Diagnostic]:
    """Diagnostics for the chain conditions; empty means the chain is perfect.

    Rules: every element valid over the forest (chain(member)); consecutive
    extension (chain(i)); strictly increasing levels (chain(ell)); every
    branch splits at least twice at the next element (chain(iii)).
    """
    out: list[Diagnostic] = []
    if not cw.chain:
        return [Diagnostic("chain(member)", "chain must be nonempty")]
    for idx, m in enumerate(cw.chain):
        for d in validate(m, cw.forest):
            out.append(Diagnostic("chain(member)", f"element {idx}: [{d.code}] {d.message}"))
    for idx in range(len(cw.chain) - 1):
        m, n = cw.chain[idx], cw.chain[idx + 1]
        if m.ell >= n.ell:
            out.append(
                Diagnostic("chain(ell)", f"levels must grow strictly at step {idx}")
            )
        if not extends(m, n):
            out.append(
                Diagnostic("chain(i)", f"element {idx + 1} does not extend element {idx}")
            )
            continue
        for nu in m.u:
            split = sum(1 for x in n.u if nu.is_prefix_of(x))
            if split < 2:
                out.append(
                    Diagnostic(
                        "chain(iii)",
                        f"branch {nu.to01()} splits {split} < 2 times at step {idx}",
                    )
                )
    return out


@dataclass(frozen=True)
class WitnessCertificate:
    """Per-pair overlap evidence extracted from a perfect witness chain."""

    eta: BitVec
    nu: BitVec
    points: tuple[BitVec, ...]  # 2*iota distinct common translates
    count: int  # overlap of the truncated forest at (eta, nu)


def extract_perfect_witness(
    cw: ChainWitness,
) -> tuple[frozenset[BitVec], list[WitnessCertificate]]:
    """Collapse a perfect chain into its branch set plus overlap certificates.

    Returns the top-level branch set P (the last element's u; every earlier
    level of the chain is recovered by restriction) and one certificate per
    unordered pair of branches.  Certificate checks that fail would mean
    check_chain lied, so they raise the internal error.
    """
    diags = check_chain(cw)
    if diags:
        raise UsageError(f"not a perfect witness chain: {diags[0]}")
    last = cw.chain[-1]
    cut = cw.forest.truncate(last.ell)
    certs: list[WitnessCertificate] = []
    for a in range(len(last.u)):
        for b in range(a + 1, len(last.u)):
            eta, nu = last.u[a], last.u[b]
            fwd = last.g[(eta, nu)]
            bwd = last.g[(nu, eta)]
            # z = eta + g works for g from either direction: z + eta is g
            # itself and z + nu is the opposite meeting point (the meeting
            # identity), so both land in the truncated top level.
            points = sorted({eta ^ v for v in fwd} | {eta ^ v for v in bwd})
            if len(points) != 2 * last.iota:
                raise InternalError("meeting points collapsed in a valid chain")
            cnt = overlap(cut, eta, nu)
            if cnt < 2 * last.iota:
                raise InternalError("overlap below 2*iota despite a valid chain")
            certs.append(WitnessCertificate(eta, nu, tuple(points), cnt))
    return frozenset(last.u), certs
