"""Increasing chains of conditions with end-of-run overlap certificates.

A run is a finite chain, each condition refining the last, driven by a
schedule of (ordinal, min height, min trees) goals.  The final condition
yields, for every pair of its ordinals, the 2*iota translated-top meeting
points certifying the pair's overlap in the final forest.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from ..errors import InternalError, UsageError
from ..forest import Forest, overlap
from ..gf2_core import BitVec
from .condition import Condition, leq, validate_condition
from .construct import extend_dense
from .oracle import RankOracle

__all__ = ["OverlapCertificate", "GenericRun", "build_chain"]


@dataclass(frozen=True)
class OverlapCertificate:
    """2*iota points witnessing that two translated top sets meet often."""

    alpha: int
    beta: int
    points: tuple[BitVec, ...]
    count: int


@dataclass(frozen=True)
class GenericRun:
    chain: tuple[Condition, ...]
    certificates: tuple[OverlapCertificate, ...]

    @property
    def final(self) -> Condition:
        return self.chain[-1]

    @property
    def final_forest(self) -> Forest:
        return self.final.forest

    @property
    def final_eta(self) -> Mapping[int, BitVec]:
        return self.final.eta


def _certify(p: Condition) -> tuple[OverlapCertificate, ...]:
    out = []
    for a, b in combinations(p.w, 2):
        pts = {p.eta[a] ^ v for v in p.g[(a, b)]}
        pts |= {p.eta[a] ^ v for v in p.g[(b, a)]}
        if len(pts) != 2 * p.iota:
            raise InternalError(f"meeting points of ({a},{b}) collapse")
        count = overlap(p.forest, p.eta[a], p.eta[b])
        if count < 2 * p.iota:
            raise InternalError(
                f"overlap of pair ({a},{b}) is {count} < {2 * p.iota}"
            )
        out.append(OverlapCertificate(a, b, tuple(sorted(pts)), count))
    return tuple(out)


def build_chain(
    seed: Condition,
    schedule: Sequence[tuple[int, int, int]],
    oracle: RankOracle,
) -> GenericRun:
    """Refine seed through each (ordinal, min height, min trees) goal.

    Every step adds the scheduled ordinal (if new) and pushes height and
    tree count strictly past the given bounds; consecutive conditions are
    checked to refine each other.  Certificates come from the last link.
    """
    bad = validate_condition(seed, oracle)
    if bad:
        raise UsageError(f"seed condition is invalid: {bad[0].code} {bad[0].message}")
    chain = [seed]
    for beta, min_n, min_m in schedule:
        cur = chain[-1]
        start = max(list(cur.w) + [beta]) + 1
        budget = max(min_n, min_m, 1) + 2
        q = extend_dense(cur, beta, min_n, min_m, range(start, start + budget))
        if not leq(cur, q):
            raise InternalError("scheduled extension does not refine the chain")
        chain.append(q)
    return GenericRun(tuple(chain), _certify(chain[-1]))
