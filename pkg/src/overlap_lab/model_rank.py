"""Threshold ranks of finite relational models.

rk(w) asks, position by position, how replaceable the elements of w are:
rank >= 0 demands that each element admits at least theta substitutes outside
w realizing the same quantifier-free type; rank >= a+1 additionally demands,
for every position, some substitute whose enlarged set keeps rank >= a.
rk_star is the clique-strengthened variant: instead of one substitute it
demands a theta-sized family through the original element whose PAIRS all
keep rank >= a.  Substitutes are always counted outside w ("theta fresh
substitutes"); see the README note on threshold semantics.

Complete-type reduction: quantifying the defining clauses over every
quantifier-free formula is equivalent to checking the complete atomic type,
which is what `qf_type` fingerprints.  The exhaustive-formula route lives in
the test suite as an oracle for this reduction.

All ranks here are finite ("theta-rank" in reports); values are memoized per
(model, theta).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence

from .errors import UsageError

__all__ = [
    "Relation",
    "FiniteModel",
    "RankParams",
    "qf_type",
    "zeta_token",
    "rk",
    "rk_star",
    "rank_certificate",
    "npr_check",
    "order_model",
    "build_successor_model",
]


@dataclass(frozen=True, slots=True)
class Relation:
    name: str
    arity: int
    tuples: frozenset[tuple[int, ...]]


@dataclass(frozen=True, slots=True)
class FiniteModel:
    """Universe {0..size-1} with named finite relations."""

    size: int
    relations: tuple[Relation, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise UsageError("model universe must be nonempty")
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise UsageError("relation names must be unique")
        for r in self.relations:
            if r.arity < 1:
                raise UsageError(f"relation {r.name} must have arity >= 1")
            for t in r.tuples:
                if len(t) != r.arity or any(not 0 <= a < self.size for a in t):
                    raise UsageError(f"relation {r.name} has an ill-formed tuple {t}")


def qf_type(model: FiniteModel, tup: Sequence[int]) -> tuple:
    """Complete quantifier-free type of the tuple, as a position pattern.

    Encodes equalities between positions and every relation's truth value on
    every index tuple.  Raw element values never appear, so types transport
    across tuples with the same atomic pattern.
    """
    n = len(tup)
    if n == 0:
        raise UsageError("type of the empty tuple is not defined")
    if any(not 0 <= a < model.size for a in tup):
        raise UsageError("tuple element outside the universe")
    eq = tuple(
        1 if tup[i] == tup[j] else 0 for i in range(n) for j in range(i + 1, n)
    )
    rels = []
    for r in model.relations:
        bits = tuple(
            1 if tuple(tup[i] for i in idx) in r.tuples else 0
            for idx in itertools.product(range(n), repeat=r.arity)
        )
        rels.append((r.name, bits))
    return (n, eq, tuple(rels))


def zeta_token(fingerprint: tuple) -> str:
    """Compact stable string form of a type fingerprint (for reports/tables)."""
    n, eq, rels = fingerprint
    parts = [f"n{n}", "e" + "".join(map(str, eq))]
    for name, bits in rels:
        parts.append(f"{name}:" + "".join(map(str, bits)))
    return "|".join(parts)


@dataclass(frozen=True, slots=True)
class RankParams:
    theta: int
    max_w: int

    def __post_init__(self) -> None:
        if self.theta < 1:
            raise UsageError("theta must be >= 1")
        if self.max_w < 1:
            raise UsageError("max_w must be >= 1")


class _Ranker:
    """Memoized rank computations for one (model, theta) pair."""

    def __init__(self, model: FiniteModel, theta: int):
        self.model = model
        self.theta = theta
        self.universe = range(model.size)
        self._rk: dict[frozenset[int], int] = {}
        self._star: dict[frozenset[int], int] = {}

    def subst_sets(self, ws: tuple[int, ...]) -> list[list[int]]:
        """Per position, the fresh substitutes realizing the same type."""
        t0 = qf_type(self.model, ws)
        inside = set(ws)
        out = []
        for k in range(len(ws)):
            cand = [
                a
                for a in self.universe
                if a not in inside
                and qf_type(self.model, ws[:k] + (a,) + ws[k + 1 :]) == t0
            ]
            out.append(cand)
        return out

    def rk(self, w: frozenset[int]) -> int:
        got = self._rk.get(w)
        if got is not None:
            return got
        ws = tuple(sorted(w))
        subst = self.subst_sets(ws)
        if any(len(s) < self.theta for s in subst):
            value = -1
        else:
            value = 1 + min(
                max((self.rk(w | {a}) for a in cand), default=-1) for cand in subst
            )
        self._rk[w] = value
        return value

    def certificate(self, w: frozenset[int]) -> tuple[int, tuple, int]:
        value = self.rk(w)
        ws = tuple(sorted(w))
        zeta = qf_type(self.model, ws)
        subst = self.subst_sets(ws)
        if value == -1:
            k = next(i for i, s in enumerate(subst) if len(s) < self.theta)
        else:
            k = next(
                i
                for i, cand in enumerate(subst)
                if all(self.rk(w | {a}) < value for a in cand)
            )
        return value, zeta, k

    def rk_star(self, w: frozenset[int]) -> int:
        got = self._star.get(w)
        if got is not None:
            return got
        ws = tuple(sorted(w))
        subst = self.subst_sets(ws)
        if any(len(s) < self.theta for s in subst):
            value = -1
        else:
            per_pos = []
            for k, a_k in enumerate(ws):
                base = w - {a_k}
                pool = [a_k] + subst[k]
                edge: dict[frozenset[int], int] = {}
                for x, y in itertools.combinations(pool, 2):
                    edge[frozenset((x, y))] = self.rk_star(base | {x, y})
                best = -1
                while self._clique_through(pool, a_k, edge, best + 1):
                    best += 1
                per_pos.append(best)
            value = 1 + min(per_pos)
        self._star[w] = value
        return value

    def _clique_through(
        self,
        pool: Sequence[int],
        anchor: int,
        edge: Mapping[frozenset[int], int],
        alpha: int,
    ) -> bool:
        """Is there a theta-clique through anchor with all edges >= alpha?"""
        neigh = [
            v for v in pool if v != anchor and edge[frozenset((anchor, v))] >= alpha
        ]
        need = self.theta - 1
        if len(neigh) < need:
            return False

        def grow(chosen: list[int], rest: list[int]) -> bool:
            if len(chosen) == need:
                return True
            for idx, v in enumerate(rest):
                if all(edge[frozenset((v, c))] >= alpha for c in chosen):
                    if grow(chosen + [v], rest[idx + 1 :]):
                        return True
            return False

        return grow([], neigh)


@lru_cache(maxsize=None)
def _ranker(model: FiniteModel, theta: int) -> _Ranker:
    return _Ranker(model, theta)


def _check_w(model: FiniteModel, w: Sequence[int], p: RankParams) -> frozenset[int]:
    ws = frozenset(w)
    if not ws:
        raise UsageError("w must be nonempty")
    if len(ws) > p.max_w:
        raise UsageError(f"|w| = {len(ws)} exceeds max_w = {p.max_w}")
    if any(not 0 <= a < model.size for a in ws):
        raise UsageError("w must be a subset of the universe")
    return ws


def rk(model: FiniteModel, w: Sequence[int], p: RankParams) -> int:
    """theta-rank of w (>= -1; always finite on a finite model)."""
    return _ranker(model, p.theta).rk(_check_w(model, w, p))


def rk_star(model: FiniteModel, w: Sequence[int], p: RankParams) -> int:
    """Clique-strengthened theta-rank; requires theta >= 2 (else divergent)."""
    if p.theta < 2:
        raise UsageError("rk_star needs theta >= 2 (singleton families are vacuous)")
    return _ranker(model, p.theta).rk_star(_check_w(model, w, p))


def rank_certificate(
    model: FiniteModel, w: Sequence[int], p: RankParams
) -> tuple[int, tuple, int]:
    """(rk, type fingerprint, least witnessing position k < |w|)."""
    return _ranker(model, p.theta).certificate(_check_w(model, w, p))


def npr_check(model: FiniteModel, eps: int, p: RankParams) -> bool:
    """True iff rk(w) < eps for every nonempty w with |w| <= max_w."""
    if eps < 0:
        raise UsageError("eps must be >= 0")
    ranker = _ranker(model, p.theta)
    for size in range(1, min(p.max_w, model.size) + 1):
        for combo in itertools.combinations(range(model.size), size):
            if ranker.rk(frozenset(combo)) >= eps:
                return False
    return True


def order_model(n: int) -> FiniteModel:
    """Universe {0..n-1} with the strict order as a single binary relation Q."""
    if n < 1:
        raise UsageError("order model needs a nonempty universe")
    tuples = frozenset((i, j) for i in range(n) for j in range(n) if i < j)
    return FiniteModel(n, (Relation("Q", 2, tuples),))


def build_successor_model(
    model: FiniteModel,
    lower: int,
    upper: int,
    maps: Optional[Mapping[int, Sequence[int]]] = None,
) -> FiniteModel:
    """Extend a model on {0..lower-1} to {0..upper-1} with history relations.

    For each relation R a new relation Q_R of arity+1 records, for every new
    point gamma in [lower, upper), which R-facts the correspondence map
    f_gamma : {0..gamma-1} -> {0..lower-1} pulls back below gamma.  S is the
    strict order on the enlarged universe and T marks the new points.

    maps[gamma] must be total on range(gamma) with values below `lower`, and
    maps[lower] must be the identity; for gamma > lower a genuine bijection
    onto `lower` cannot exist, so any total map is accepted.  Default:
    f_gamma(x) = x mod lower.
    """
    if model.size != lower:
        raise UsageError(f"model size {model.size} must equal lower = {lower}")
    if not 1 <= lower <= upper:
        raise UsageError("need 1 <= lower <= upper")
    if maps is None:
        maps = {g: tuple(x % lower for x in range(g)) for g in range(lower, upper)}
    for g in range(lower, upper):
        if g not in maps:
            raise UsageError(f"missing correspondence map for {g}")
        fg = maps[g]
        if len(fg) != g or any(not 0 <= v < lower for v in fg):
            raise UsageError(f"map for {g} must send range({g}) into range({lower})")
    if upper > lower and tuple(maps[lower]) != tuple(range(lower)):
        raise UsageError(f"map for {lower} must be the identity")

    new_rels = list(model.relations)
    for r in model.relations:
        qt: set[tuple[int, ...]] = set()
        for g in range(lower, upper):
            fg = maps[g]
            for base in itertools.product(range(g), repeat=r.arity):
                if tuple(fg[b] for b in base) in r.tuples:
                    qt.add(base + (g,))
        new_rels.append(Relation("Q_" + r.name, r.arity + 1, frozenset(qt)))
    new_rels.append(
        Relation(
            "S", 2, frozenset((i, j) for i in range(upper) for j in range(upper) if i < j)
        )
    )
    new_rels.append(Relation("T", 1, frozenset((g,) for g in range(lower, upper))))
    names = [r.name for r in new_rels]
    if len(set(names)) != len(names):
        raise UsageError("relation name collision with S/T/Q_ prefixes")
    return FiniteModel(upper, tuple(new_rels))
