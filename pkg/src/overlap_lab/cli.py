"""Command-line verifier: validate, order-check, build and measure artifacts.

Exit codes: 0 = success / property holds; 1 = semantic failure (invalid
condition, false order, violated property, unmet resource bounds);
2 = unusable input (parse errors, missing files, bad parameters).

Every command prints a report to standard output (text by default,
`--format json` for machines) and is deterministic for fixed inputs and
--seed; wall-clock timing goes to standard error only.  Artifact outputs
(`--output`) are canonical JSON: equal objects give byte-equal files.
`OVERLAP_LAB_THREADS` caps worker parallelism (the current implementation
is single-threaded, so any cap is honored trivially); results never depend
on it.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .errors import InternalError, OracleError, ResourceError, UsageError
from .forest import overlap, stnd_at_depth
from .gf2_core import check_pair_family, from01, solve_translate
from .jsonio import (
    SCHEMA,
    chain_witness_to_json,
    condition_from_json,
    condition_to_json,
    dumps_canonical,
    forest_from_json,
    load_document,
    model_from_json,
    oracle_from_json,
    run_to_json,
)
from .model_rank import RankParams, npr_check, rank_certificate, rk, rk_star, zeta_token
from .rank_ndrk import (
    ChainWitness,
    check_chain,
    doubling_chain,
    ndrk_table,
    structure_poset,
)
from .forcing import (
    amalgamate,
    bootstrap,
    build_chain,
    extend_dense,
    leq_failures,
    validate_condition,
)

_TIMER = time.monotonic


def _digest(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()[:16]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_artifact(path: str, doc: dict) -> None:
    data = dumps_canonical(doc)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _report(args, inputs: dict[str, str], results: dict, lines: list[str]) -> None:
    if args.format == "json":
        doc = {
            "schema": SCHEMA,
            "command": args.command,
            "inputs": {k: _digest(v) for k, v in inputs.items()},
            "results": results,
            "version": __version__,
        }
        sys.stdout.write(dumps_canonical(doc))
    else:
        for line in lines:
            print(line)


def _load_oracle(path: Optional[str]):
    if path is None:
        raise UsageError("--oracle is required for this command")
    return oracle_from_json(load_document(path))


def _load_condition(path: Optional[str]):
    if path is None:
        raise UsageError("--input is required for this command")
    return condition_from_json(load_document(path))


def _load_forest(path: Optional[str]):
    if path is None:
        raise UsageError("--input is required for this command")
    return forest_from_json(load_document(path))


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    p = _load_condition(args.input)
    oracle = _load_oracle(args.oracle)
    diags = validate_condition(p, oracle)
    results = {
        "valid": not diags,
        "diagnostics": [{"code": d.code, "message": d.message} for d in diags],
    }
    lines = ["valid"] if not diags else [f"{d.code} {d.message}" for d in diags]
    _report(args, {"input": args.input, "oracle": args.oracle}, results, lines)
    return 0 if not diags else 1


def cmd_leq(args) -> int:
    p = condition_from_json(load_document(args.p))
    q = condition_from_json(load_document(args.q))
    failures = leq_failures(p, q)
    results = {"leq": not failures, "failures": failures}
    lines = ["true"] if not failures else ["false"] + [f"  {f}" for f in failures]
    _report(args, {"p": args.p, "q": args.q}, results, lines)
    return 0 if not failures else 1


def cmd_extend(args) -> int:
    p = _load_condition(args.input)
    if args.add is None:
        raise UsageError("--add ORDINAL is required")
    start = max(list(p.w) + [args.add]) + 1
    budget = max(args.min_n, args.min_m, 1) + 2
    q = extend_dense(p, args.add, args.min_n, args.min_m, range(start, start + budget))
    doc = condition_to_json(q)
    if args.output:
        _write_artifact(args.output, doc)
    else:
        sys.stdout.write(dumps_canonical(doc))
    results = {
        "w": list(q.w),
        "n": q.n,
        "M": q.M,
        "output": args.output,
    }
    lines = [f"extended to |w|={len(q.w)} n={q.n} M={q.M}"]
    if args.output:
        _report(args, {"input": args.input}, results, lines)
    return 0


def cmd_amalgamate(args) -> int:
    p1 = _load_condition(args.input)
    if args.twin is None:
        raise UsageError("--twin CONDITION is required")
    p2 = condition_from_json(load_document(args.twin))
    oracle = _load_oracle(args.oracle)
    q = amalgamate(p1, p2, oracle)
    doc = condition_to_json(q)
    if args.output:
        _write_artifact(args.output, doc)
    else:
        sys.stdout.write(dumps_canonical(doc))
    results = {"w": list(q.w), "n": q.n, "M": q.M, "output": args.output}
    lines = [f"amalgam over w={list(q.w)}: n={q.n} M={q.M}"]
    if args.output:
        _report(
            args,
            {"input": args.input, "twin": args.twin, "oracle": args.oracle},
            results,
            lines,
        )
    return 0


def _parse_w(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise UsageError(f"--bootstrap-w expects comma-separated integers, got {text!r}")


def cmd_chain(args) -> int:
    inputs: dict[str, str] = {"oracle": args.oracle}
    if args.bootstrap_w is not None:
        seed = bootstrap(_parse_w(args.bootstrap_w), args.iota)
    else:
        seed = _load_condition(args.input)
        inputs["input"] = args.input
    oracle = _load_oracle(args.oracle)
    schedule = [(b, 0, 0) for b in args.add]
    if args.min_n or args.min_m:
        if schedule:
            schedule[-1] = (schedule[-1][0], args.min_n, args.min_m)
        else:
            schedule = [(seed.w[0], args.min_n, args.min_m)]
    run = build_chain(seed, schedule, oracle)
    doc = run_to_json(run)
    if args.output:
        _write_artifact(args.output, doc)
    final = run.final
    min_count = min((c.count for c in run.certificates), default=0)
    results = {
        "steps": len(run.chain),
        "final_w": list(final.w),
        "final_n": final.n,
        "final_M": final.M,
        "certificates": len(run.certificates),
        "min_overlap": min_count,
        "output": args.output,
    }
    lines = [
        f"chain of {len(run.chain)} conditions; final |w|={len(final.w)} "
        f"n={final.n} M={final.M}",
        f"certificates: {len(run.certificates)} pairs, min overlap {min_count}",
    ]
    if not args.output:
        sys.stdout.write(dumps_canonical(doc))
        return 0
    _report(args, inputs, results, lines)
    return 0


def cmd_ndrk(args) -> int:
    forest = _load_forest(args.input)
    poset = structure_poset(forest, args.iota, args.max_u)
    ranks = ndrk_table(forest, args.iota, args.max_u)
    table = []
    sup = 0
    for m in poset:
        value = ranks[m.key()]
        sup = max(sup, value + 1)
        if args.per_structure:
            table.append({"ell": m.ell, "u": [x.to01() for x in m.u], "rank": value})
    results: dict = {"ndrk_sup": sup, "structures": len(poset)}
    lines = [f"ndrk sup: {sup} over {len(poset)} structures"]
    if args.per_structure:
        results["per_structure"] = table
        for row in table:
            lines.append(f"  ell={row['ell']} u={row['u']} rank={row['rank']}")
    if args.witness:
        chain = doubling_chain(forest, args.iota, args.max_u)
        if len(chain) < 2:
            print("no witness chain of length >= 2 exists", file=sys.stderr)
            return 1
        cw = ChainWitness(forest, tuple(chain))
        bad = check_chain(cw)
        if bad:
            raise InternalError(f"witness chain fails its own check: {bad[0]}")
        _write_artifact(args.witness, chain_witness_to_json(cw))
        results["witness"] = {"length": len(chain), "path": args.witness}
        lines.append(f"witness chain of length {len(chain)} written to {args.witness}")
    _report(args, {"input": args.input}, results, lines)
    return 0


def cmd_overlap(args) -> int:
    forest = _load_forest(args.input)
    x = from01(args.x)
    y = from01(args.y)
    count = overlap(forest, x, y)
    _report(
        args,
        {"input": args.input},
        {"overlap": count},
        [str(count)],
    )
    return 0


def cmd_stnd(args) -> int:
    forest = _load_forest(args.input)
    x = from01(args.x)
    y = from01(args.y)
    ok = stnd_at_depth(forest, args.depth, x, y)
    _report(args, {"input": args.input}, {"stnd": ok}, ["true" if ok else "false"])
    return 0 if ok else 1


def cmd_rank(args) -> int:
    model = model_from_json(load_document(args.input))
    if args.theta is None:
        raise UsageError("--theta is required")
    params = RankParams(args.theta, args.max_w)
    universe = list(range(model.size))
    rows = []
    from itertools import combinations

    for size in range(1, args.max_w + 1):
        for w in combinations(universe, size):
            row: dict = {"w": list(w), "theta_rank": rk(model, w, params)}
            if args.star:
                row["theta_rank_star"] = rk_star(model, w, params)
            rows.append(row)
    results: dict = {"theta": args.theta, "table": rows}
    lines = []
    for row in rows:
        extra = f" star={row['theta_rank_star']}" if args.star else ""
        lines.append(f"w={row['w']} theta-rank={row['theta_rank']}{extra}")
    if args.eps is not None:
        verdict = npr_check(model, args.eps, params)
        results["npr"] = verdict
        lines.append(f"npr({args.eps}): {'holds' if verdict else 'fails'}")
    _report(args, {"input": args.input}, results, lines)
    return 0


def cmd_lemma43(args) -> int:
    doc = load_document(args.input)
    if "pairs" in doc:
        bstar = from01(doc.get("bstar", ""))
        b = [from01(s) for s in doc.get("b", [])]
        pairs = [
            (from01(p[0]), from01(p[1])) for p in doc.get("pairs", [])
        ]
        ok = check_pair_family(bstar, b, pairs)
        _report(
            args,
            {"input": args.input},
            {"family": ok},
            ["true" if ok else "false"],
        )
        return 0 if ok else 1
    a = [from01(s) for s in doc.get("a", [])]
    b = [from01(s) for s in doc.get("b", [])]
    rho = solve_translate(a, b)
    results = {"translation": rho.to01() if rho is not None else None}
    _report(
        args,
        {"input": args.input},
        results,
        [rho.to01() if rho is not None else "none"],
    )
    return 0 if rho is not None else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="overlap-lab",
        description="verify and build branch-overlap artifacts",
    )
    top.add_argument("--version", action="version", version=f"overlap-lab {__version__}")
    subs = top.add_subparsers(dest="command", required=True)

    def common(sp, oracle=False, output=False):
        sp.add_argument("--format", choices=("json", "text"), default="text")
        sp.add_argument("--seed", type=int, default=0, help="determinism seed")
        if oracle:
            sp.add_argument("--oracle", help="rank oracle JSON")
        if output:
            sp.add_argument("--output", help="artifact output path")

    sp = subs.add_parser("validate", help="check a condition against all rules")
    sp.add_argument("--input", required=True)
    common(sp, oracle=True)
    sp.set_defaults(func=cmd_validate)

    sp = subs.add_parser("leq", help="does the second condition refine the first")
    sp.add_argument("p")
    sp.add_argument("q")
    common(sp)
    sp.set_defaults(func=cmd_leq)

    sp = subs.add_parser("extend", help="adjoin an ordinal and grow past bounds")
    sp.add_argument("--input", required=True)
    sp.add_argument("--add", type=int, required=True, help="ordinal to adjoin")
    sp.add_argument("--min-n", type=int, default=0, dest="min_n")
    sp.add_argument("--min-M", type=int, default=0, dest="min_m")
    common(sp, output=True)
    sp.set_defaults(func=cmd_extend)

    sp = subs.add_parser("amalgamate", help="common refinement of twin conditions")
    sp.add_argument("--input", required=True)
    sp.add_argument("--twin", required=True)
    common(sp, oracle=True, output=True)
    sp.set_defaults(func=cmd_amalgamate)

    sp = subs.add_parser("chain", help="build a scheduled increasing chain")
    sp.add_argument("--input")
    sp.add_argument("--bootstrap-w", dest="bootstrap_w", help="comma list: seed support")
    sp.add_argument("--iota", type=int, default=3)
    sp.add_argument("--add", type=int, action="append", default=[])
    sp.add_argument("--min-n", type=int, default=0, dest="min_n")
    sp.add_argument("--min-M", type=int, default=0, dest="min_m")
    common(sp, oracle=True, output=True)
    sp.set_defaults(func=cmd_chain)

    sp = subs.add_parser("ndrk", help="depth-bounded branching rank of a forest")
    sp.add_argument("--input", required=True)
    sp.add_argument("--iota", type=int, default=3)
    sp.add_argument("--max-u", type=int, default=4, dest="max_u")
    sp.add_argument("--per-structure", action="store_true", dest="per_structure")
    sp.add_argument("--witness", help="write the longest doubling chain here")
    common(sp)
    sp.set_defaults(func=cmd_ndrk)

    sp = subs.add_parser("overlap", help="count common translated tops")
    sp.add_argument("--input", required=True)
    sp.add_argument("-x", required=True, help="first point (0/1 string)")
    sp.add_argument("-y", required=True, help="second point (0/1 string)")
    common(sp)
    sp.set_defaults(func=cmd_overlap)

    sp = subs.add_parser("stnd", help="is a pair's meeting visible at a depth")
    sp.add_argument("--input", required=True)
    sp.add_argument("-x", required=True)
    sp.add_argument("-y", required=True)
    sp.add_argument("--depth", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_stnd)

    sp = subs.add_parser("rank", help="theta-rank table of a finite model")
    sp.add_argument("--input", required=True)
    sp.add_argument("--theta", type=int)
    sp.add_argument("--max-w", type=int, default=2, dest="max_w")
    sp.add_argument("--star", action="store_true")
    sp.add_argument("--eps", type=int)
    common(sp)
    sp.set_defaults(func=cmd_rank)

    sp = subs.add_parser("lemma43", help="translation solving / pair-family check")
    sp.add_argument("--input", required=True)
    common(sp)
    sp.set_defaults(func=cmd_lemma43)

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = _TIMER()
    try:
        rc = args.func(args)
    except (UsageError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InternalError, ResourceError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    finally:
        ms = (_TIMER() - t0) * 1000.0
        print(f"# {getattr(args, 'command', '?')}: {ms:.0f} ms", file=sys.stderr)
    return rc


if __name__ == "__main__":
    sys.exit(main())
