"""Rank oracles answering (value, zeta, k) queries about finite ordinal sets.

Conditions consult an oracle for the rank data of subsets of their support:
`value` is the theta-rank, `zeta` a type token (equal tokens mean "same
shape"), and `k` the least witnessing position (k < |v|).  Two backings are
provided: a finite model with parameters (values computed on demand and
memoized) and a literal lookup table.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..errors import OracleError
from ..model_rank import FiniteModel, RankParams, rank_certificate, zeta_token

__all__ = ["RankData", "RankOracle", "ModelOracle", "TableOracle"]


@dataclass(frozen=True, slots=True)
class RankData:
    value: int
    zeta: str
    k: int


class RankOracle:
    """Interface: `data(v)` for nonempty sorted-able sets of naturals."""

    def data(self, v: Sequence[int]) -> RankData:  # pragma: no cover - interface
        raise NotImplementedError

    def _checked(self, v: Sequence[int], out: RankData) -> RankData:
        if out.value < -1:
            raise OracleError(f"rank below -1 for {sorted(v)}")
        if not 0 <= out.k < len(set(v)):
            raise OracleError(f"witness position {out.k} out of range for {sorted(v)}")
        return out


class ModelOracle(RankOracle):
    """Rank data from a finite model; ordinals embed order-preservingly."""

    def __init__(
        self,
        model: FiniteModel,
        theta: int,
        embedding: Optional[Mapping[int, int]] = None,
    ):
        self.model = model
        self.theta = theta
        self.embedding = dict(embedding) if embedding is not None else None
        if self.embedding is not None:
            items = sorted(self.embedding.items())
            vals = [v for _, v in items]
            if any(not 0 <= v < model.size for v in vals):
                raise OracleError("embedding must land inside the universe")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise OracleError("embedding must be strictly increasing")

    def _embed(self, a: int) -> int:
        if self.embedding is None:
            if not 0 <= a < self.model.size:
                raise OracleError(
                    f"ordinal {a} outside the model universe (size {self.model.size}); "
                    "provide an embedding"
                )
            return a
        if a not in self.embedding:
            raise OracleError(f"ordinal {a} missing from the oracle embedding")
        return self.embedding[a]

    def data(self, v: Sequence[int]) -> RankData:
        vs = sorted(set(v))
        if not vs:
            raise OracleError("rank data of the empty set is not defined")
        w = [self._embed(a) for a in vs]
        params = RankParams(self.theta, max_w=self.model.size)
        value, zeta, k = rank_certificate(self.model, w, params)
        return self._checked(vs, RankData(value, zeta_token(zeta), k))


class TableOracle(RankOracle):
    """Literal (sorted tuple -> RankData) lookup; misses are oracle errors."""

    def __init__(self, entries: Mapping[tuple[int, ...], RankData]):
        self.entries = {tuple(sorted(k)): v for k, v in entries.items()}

    def data(self, v: Sequence[int]) -> RankData:
        key = tuple(sorted(set(v)))
        if key not in self.entries:
            raise OracleError(f"table oracle has no entry for {key}")
        return self._checked(key, self.entries[key])
