"""Bit-exact JSON round-trips for every object the tool reads or writes.

Words serialize as 0/1 strings (coordinate 0 leftmost).  Pair-indexed maps
become objects with comma-joined keys ("eta,nu" words, "alpha,beta"
ordinals).  Every top-level document carries `"schema": "overlap-lab/1"`;
readers reject a foreign tag and tolerate a missing one.  `dumps_canonical`
fixes the byte form (sorted keys, two-space indent, trailing newline) so
equal objects produce equal files.
"""
from __future__ import annotations

import json
from typing import Any, Mapping

from .errors import UsageError
from .forest import Forest, Tree
from .gf2_core import BitVec, from01
from .model_rank import FiniteModel, Relation
from .structures import MStruct
from .rank_ndrk import ChainWitness
from .forcing.chain import GenericRun, OverlapCertificate
from .forcing.condition import Condition
from .forcing.oracle import ModelOracle, RankData, RankOracle, TableOracle

__all__ = [
    "SCHEMA",
    "dumps_canonical",
    "load_document",
    "forest_to_json",
    "forest_from_json",
    "structure_to_json",
    "structure_from_json",
    "model_to_json",
    "model_from_json",
    "oracle_to_json",
    "oracle_from_json",
    "condition_to_json",
    "condition_from_json",
    "run_to_json",
    "run_from_json",
    "chain_witness_to_json",
    "chain_witness_from_json",
]

SCHEMA = "overlap-lab/1"


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_document(path: str) -> dict:
    """Parse a JSON file; malformed input raises a usage error with location."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"{path} is not valid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: expected a JSON object at top level")
    return doc


def _check_schema(d: Mapping, what: str) -> None:
    tag = d.get("schema")
    if tag is not None and tag != SCHEMA:
        raise UsageError(f"{what}: unsupported schema tag {tag!r} (expected {SCHEMA!r})")


def _word(s: Any, what: str) -> BitVec:
    if not isinstance(s, str) or set(s) - {"0", "1"}:
        raise UsageError(f"{what}: expected a 0/1 string, got {s!r}")
    return from01(s)


def _nat(x: Any, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise UsageError(f"{what}: expected a non-negative integer, got {x!r}")
    return x


def _list(x: Any, what: str) -> list:
    if not isinstance(x, list):
        raise UsageError(f"{what}: expected a list, got {type(x).__name__}")
    return x


def _obj(x: Any, what: str) -> dict:
    if not isinstance(x, dict):
        raise UsageError(f"{what}: expected an object, got {type(x).__name__}")
    return x


# ---------------------------------------------------------------- forests

def forest_to_json(f: Forest) -> dict:
    return {
        "schema": SCHEMA,
        "n": f.height,
        "trees": [sorted(t.to01() for t in tree.tops) for tree in f.trees],
    }


def forest_from_json(d: Mapping) -> Forest:
    _check_schema(d, "forest")
    n = _nat(d.get("n"), "forest.n")
    trees = []
    for idx, tops in enumerate(_list(d.get("trees"), "forest.trees")):
        words = [_word(s, f"forest.trees[{idx}]") for s in _list(tops, f"forest.trees[{idx}]")]
        if any(len(x) != n for x in words):
            raise UsageError(f"forest.trees[{idx}]: top length differs from n={n}")
        if not words:
            raise UsageError(f"forest.trees[{idx}]: a tree needs at least one top")
        trees.append(Tree.from_tops(n, words))
    return Forest(n, tuple(trees))


# -------------------------------------------------------------- structures

def structure_to_json(m: MStruct) -> dict:
    return {
        "schema": SCHEMA,
        "ell": m.ell,
        "iota": m.iota,
        "u": [x.to01() for x in m.u],
        "h": {f"{x.to01()},{y.to01()}": list(m.h[(x, y)]) for x, y in m.pairs()},
        "g": {
            f"{x.to01()},{y.to01()}": [v.to01() for v in m.g[(x, y)]]
            for x, y in m.pairs()
        },
    }


def _split_key(key: str, what: str) -> tuple[str, str]:
    parts = key.split(",")
    if len(parts) != 2:
        raise UsageError(f"{what}: key {key!r} is not of the form 'a,b'")
    return parts[0], parts[1]


def structure_from_json(d: Mapping) -> MStruct:
    _check_schema(d, "structure")
    ell = _nat(d.get("ell"), "structure.ell")
    iota = _nat(d.get("iota"), "structure.iota")
    u = [_word(s, "structure.u") for s in _list(d.get("u"), "structure.u")]
    h: dict[tuple[BitVec, BitVec], tuple[int, ...]] = {}
    g: dict[tuple[BitVec, BitVec], tuple[BitVec, ...]] = {}
    for key, val in _obj(d.get("h"), "structure.h").items():
        a, b = _split_key(key, "structure.h")
        h[(_word(a, "structure.h"), _word(b, "structure.h"))] = tuple(
            _nat(x, f"structure.h[{key}]") for x in _list(val, f"structure.h[{key}]")
        )
    for key, val in _obj(d.get("g"), "structure.g").items():
        a, b = _split_key(key, "structure.g")
        g[(_word(a, "structure.g"), _word(b, "structure.g"))] = tuple(
            _word(x, f"structure.g[{key}]") for x in _list(val, f"structure.g[{key}]")
        )
    return MStruct(ell, iota, u, h, g)


# ------------------------------------------------------------------ models

def model_to_json(m: FiniteModel) -> dict:
    return {
        "schema": SCHEMA,
        "size": m.size,
        "relations": [
            {
                "name": rel.name,
                "arity": rel.arity,
                "tuples": sorted(list(t) for t in rel.tuples),
            }
            for rel in m.relations
        ],
    }


def model_from_json(d: Mapping) -> FiniteModel:
    _check_schema(d, "model")
    size = _nat(d.get("size"), "model.size")
    rels = []
    for idx, rd in enumerate(_list(d.get("relations"), "model.relations")):
        rd = _obj(rd, f"model.relations[{idx}]")
        name = rd.get("name")
        if not isinstance(name, str) or not name:
            raise UsageError(f"model.relations[{idx}].name must be a non-empty string")
        arity = _nat(rd.get("arity"), f"model.relations[{idx}].arity")
        tuples = [
            tuple(_nat(x, f"model.relations[{idx}].tuples") for x in t)
            for t in _list(rd.get("tuples"), f"model.relations[{idx}].tuples")
        ]
        rels.append(Relation(name, arity, frozenset(tuples)))
    return FiniteModel(size, tuple(rels))


# ----------------------------------------------------------------- oracles

def oracle_to_json(o: RankOracle) -> dict:
    if isinstance(o, ModelOracle):
        out = {
            "schema": SCHEMA,
            "kind": "model",
            "theta": o.theta,
            "model": model_to_json(o.model),
        }
        if o.embedding is not None:
            out["embedding"] = {str(k): v for k, v in sorted(o.embedding.items())}
        return out
    if isinstance(o, TableOracle):
        return {
            "schema": SCHEMA,
            "kind": "table",
            "entries": {
                ",".join(map(str, key)): {"value": rd.value, "zeta": rd.zeta, "k": rd.k}
                for key, rd in sorted(o.entries.items())
            },
        }
    raise UsageError(f"cannot serialize oracle of type {type(o).__name__}")


def oracle_from_json(d: Mapping) -> RankOracle:
    _check_schema(d, "oracle")
    kind = d.get("kind")
    if kind == "model":
        model = model_from_json(_obj(d.get("model"), "oracle.model"))
        theta = _nat(d.get("theta"), "oracle.theta")
        emb = d.get("embedding")
        embedding = None
        if emb is not None:
            embedding = {}
            for key, val in _obj(emb, "oracle.embedding").items():
                try:
                    a = int(key)
                except ValueError:
                    raise UsageError(f"oracle.embedding: bad ordinal key {key!r}")
                embedding[a] = _nat(val, f"oracle.embedding[{key}]")
        return ModelOracle(model, theta, embedding)
    if kind == "table":
        entries: dict[tuple[int, ...], RankData] = {}
        for key, val in _obj(d.get("entries"), "oracle.entries").items():
            try:
                tup = tuple(int(x) for x in key.split(","))
            except ValueError:
                raise UsageError(f"oracle.entries: bad key {key!r}")
            val = _obj(val, f"oracle.entries[{key}]")
            zeta = val.get("zeta")
            if not isinstance(zeta, str):
                raise UsageError(f"oracle.entries[{key}].zeta must be a string")
            value = val.get("value")
            if not isinstance(value, int) or isinstance(value, bool) or value < -1:
                raise UsageError(f"oracle.entries[{key}].value must be an integer >= -1")
            entries[tup] = RankData(value, zeta, _nat(val.get("k"), f"oracle.entries[{key}].k"))
        return TableOracle(entries)
    raise UsageError(f"oracle.kind must be 'model' or 'table', got {kind!r}")


# -------------------------------------------------------------- conditions

def condition_to_json(p: Condition) -> dict:
    forest = forest_to_json(p.forest)
    forest.pop("schema")
    return {
        "schema": SCHEMA,
        "iota": p.iota,
        "w": list(p.w),
        "n": p.n,
        "M": p.M,
        "eta": {str(a): p.eta[a].to01() for a in p.w},
        "trees": forest,
        "r": list(p.r),
        "h": {f"{a},{b}": list(p.h[(a, b)]) for a, b in p.pairs()},
        "g": {f"{a},{b}": [v.to01() for v in p.g[(a, b)]] for a, b in p.pairs()},
    }


def condition_from_json(d: Mapping) -> Condition:
    _check_schema(d, "condition")
    iota = _nat(d.get("iota"), "condition.iota")
    w = [_nat(x, "condition.w") for x in _list(d.get("w"), "condition.w")]
    forest = forest_from_json(_obj(d.get("trees"), "condition.trees"))
    n = _nat(d.get("n"), "condition.n")
    m_count = _nat(d.get("M"), "condition.M")
    if n != forest.height:
        raise UsageError(f"condition.n = {n} but the forest has height {forest.height}")
    if m_count != len(forest.trees):
        raise UsageError(
            f"condition.M = {m_count} but the forest has {len(forest.trees)} trees"
        )
    eta = {}
    for key, val in _obj(d.get("eta"), "condition.eta").items():
        try:
            a = int(key)
        except ValueError:
            raise UsageError(f"condition.eta: bad ordinal key {key!r}")
        eta[a] = _word(val, f"condition.eta[{key}]")
    r = [_nat(x, "condition.r") for x in _list(d.get("r"), "condition.r")]

    def pair_key(key: str, what: str) -> tuple[int, int]:
        a, b = _split_key(key, what)
        try:
            return (int(a), int(b))
        except ValueError:
            raise UsageError(f"{what}: bad ordinal pair {key!r}")

    h = {}
    for key, val in _obj(d.get("h"), "condition.h").items():
        h[pair_key(key, "condition.h")] = tuple(
            _nat(x, f"condition.h[{key}]") for x in _list(val, f"condition.h[{key}]")
        )
    g = {}
    for key, val in _obj(d.get("g"), "condition.g").items():
        g[pair_key(key, "condition.g")] = tuple(
            _word(x, f"condition.g[{key}]") for x in _list(val, f"condition.g[{key}]")
        )
    return Condition(iota, w, eta, forest, r, h, g)


# -------------------------------------------------------------------- runs

def run_to_json(run: GenericRun) -> dict:
    final_forest = forest_to_json(run.final_forest)
    final_forest.pop("schema")
    chain = []
    for p in run.chain:
        cd = condition_to_json(p)
        cd.pop("schema")
        chain.append(cd)
    return {
        "schema": SCHEMA,
        "chain": chain,
        "final_forest": final_forest,
        "final_eta": {str(a): v.to01() for a, v in sorted(run.final_eta.items())},
        "certificates": [
            {
                "alpha": c.alpha,
                "beta": c.beta,
                "points": [x.to01() for x in c.points],
                "count": c.count,
            }
            for c in run.certificates
        ],
    }


def run_from_json(d: Mapping) -> GenericRun:
    _check_schema(d, "run")
    chain = tuple(
        condition_from_json(_obj(cd, f"run.chain[{i}]"))
        for i, cd in enumerate(_list(d.get("chain"), "run.chain"))
    )
    if not chain:
        raise UsageError("run.chain must be non-empty")
    certs = []
    for i, cd in enumerate(_list(d.get("certificates"), "run.certificates")):
        cd = _obj(cd, f"run.certificates[{i}]")
        certs.append(
            OverlapCertificate(
                _nat(cd.get("alpha"), f"run.certificates[{i}].alpha"),
                _nat(cd.get("beta"), f"run.certificates[{i}].beta"),
                tuple(
                    _word(x, f"run.certificates[{i}].points")
                    for x in _list(cd.get("points"), f"run.certificates[{i}].points")
                ),
                _nat(cd.get("count"), f"run.certificates[{i}].count"),
            )
        )
    run = GenericRun(chain, tuple(certs))
    ff = d.get("final_forest")
    if ff is not None and forest_from_json(_obj(ff, "run.final_forest")) != run.final_forest:
        raise UsageError("run.final_forest does not match the last chain link")
    fe = d.get("final_eta")
    if fe is not None:
        eta = {}
        for key, val in _obj(fe, "run.final_eta").items():
            eta[int(key)] = _word(val, f"run.final_eta[{key}]")
        if eta != dict(run.final_eta):
            raise UsageError("run.final_eta does not match the last chain link")
    return run


# ---------------------------------------------------------- chain witnesses

def chain_witness_to_json(cw: ChainWitness) -> dict:
    forest = forest_to_json(cw.forest)
    forest.pop("schema")
    chain = []
    for m in cw.chain:
        md = structure_to_json(m)
        md.pop("schema")
        chain.append(md)
    return {"schema": SCHEMA, "forest": forest, "chain": chain}


def chain_witness_from_json(d: Mapping) -> ChainWitness:
    _check_schema(d, "chain witness")
    forest = forest_from_json(_obj(d.get("forest"), "chain-witness.forest"))
    chain = tuple(
        structure_from_json(_obj(md, f"chain-witness.chain[{i}]"))
        for i, md in enumerate(_list(d.get("chain"), "chain-witness.chain"))
    )
    return ChainWitness(forest, chain)
