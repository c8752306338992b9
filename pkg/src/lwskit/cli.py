"""Command line front end: ``lwskit {gen,solve,reduce,verify,bench}``.

Exit codes
    0  success
    1  verification or certification mismatch
    2  bad command line
    3  malformed or unsupported instance file
    4  size budget exceeded
    5  instance outside the chosen solver's class
    6  arithmetic overflow
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import generate as gen_mod
from . import oracles, problems, reductions
from .dp_core import (Interval2dInstance, KdLwsInstance, LwsInstance, PtInstance, instance_from_json,
                      instance_to_json, lws_as_kd, solve_interval_2dlws_naive, solve_kdlws_naive,
                      solve_lws_naive, solve_pt_naive)
from .fast_solvers import (PreconditionError, StaticSolverKind, solve_2dlws_slicerank1,
                           solve_2dlws_slicerank1_naive_compiled, solve_kdlws_dc, solve_pt_knuth)
from .tensors import INF, SCHEMA, BudgetError

EXIT_MISMATCH, EXIT_USAGE, EXIT_SCHEMA, EXIT_BUDGET, EXIT_PRECONDITION, EXIT_OVERFLOW = 1, 2, 3, 4, 5, 6


class SchemaError(ValueError):
    pass


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _fmt(v) -> str:
    return "inf" if v == INF else str(v)


# ----------------------------------------------------------------------------
# solvers by name

def _kd_dc(kind):
    return lambda inst: solve_kdlws_dc(inst, kind)


KD_SOLVERS = {
    "naive": lambda inst: solve_kdlws_naive(inst)[1],
    "dc": _kd_dc(StaticSolverKind.NAIVE),
    "rank1": _kd_dc(StaticSolverKind.RANK1_ENVELOPE),
    "slicerank1": _kd_dc(StaticSolverKind.SLICE_RANK1),
    "hierarchy": _kd_dc(StaticSolverKind.HIERARCHY),
    "fast": solve_2dlws_slicerank1,
    "compiled-naive": solve_2dlws_slicerank1_naive_compiled,
}
PT_SOLVERS = {"naive": lambda inst: solve_pt_naive(inst)[1], "knuth": solve_pt_knuth}


def run_solver(inst, solver: str):
    if isinstance(inst, LwsInstance):
        if solver == "naive":
            return solve_lws_naive(inst)[1]
        inst = lws_as_kd(inst)
    if isinstance(inst, KdLwsInstance):
        table = KD_SOLVERS
    elif isinstance(inst, PtInstance):
        table = PT_SOLVERS
    elif isinstance(inst, Interval2dInstance):
        table = {"naive": solve_interval_2dlws_naive}
    else:
        raise SchemaError(f"nothing solves {type(inst).__name__}")
    if solver not in table:
        raise PreconditionError(f"solver {solver!r} does not apply; choose from {sorted(table)}")
    return table[solver](inst)


# ----------------------------------------------------------------------------
# gen

def _params(pairs) -> dict:
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise SchemaError(f"parameter {p!r} is not key=value")
        key, val = p.split("=", 1)
        out[key] = val
    return out


def _sequence(params, key, rng, n, lo, hi):
    return _ints(params[key]) if key in params else rng.integers(lo, hi + 1, n).tolist()


def build(problem: str, n: int, k: int, d: int, seed: int, params: dict) -> dict:
    """Instance JSON for ``problem``; application instances carry a ``decode`` rule."""
    rng = np.random.default_rng(seed)
    decode = None
    if problem == "lws":
        inst = gen_mod.random_lws(n, rng)
    elif problem == "kdlws":
        inst = gen_mod.random_kdlws(k, n, rng)
    elif problem == "rank1-kdlws":
        inst = gen_mod.random_rank1_kdlws(k, n, rng)
    elif problem == "cp-kdlws":
        inst = gen_mod.random_cp_kdlws(k, n, d, rng)
    elif problem == "slicerank1-kdlws":
        inst = gen_mod.random_slicerank1_kdlws(k, n, rng)
    elif problem == "slicerank1-2dlws":
        inst = gen_mod.bench_slicerank1_2d(n, rng)
    elif problem == "pt":
        inst = gen_mod.random_pt(n, rng)
    elif problem == "interval2d":
        inst = gen_mod.random_interval2d_cp(n, d, rng)
    elif problem == "lis":
        inst = problems.encode_lis(_sequence(params, "seq", rng, n, 0, 2 * n))
        decode = "negate"
    elif problem == "refuel":
        stops = _ints(params["stops"]) if "stops" in params else sorted(rng.choice(10 * n + 10, n + 1, replace=False).tolist())
        inst = problems.encode_refuel_1d(stops, int(params.get("hop", 5)))
    elif problem == "arrival-fee":
        inst = problems.encode_refuel_arrival_fee(k, n, rng.integers(0, 10, (n,) * k))
    elif problem == "nested-boxes":
        boxes = json.loads(params["boxes"]) if "boxes" in params else rng.integers(1, 5, (n, d)).tolist()
        inst = problems.encode_nested_boxes(boxes, int(params.get("piles", k)))
        decode = "boxes"
    elif problem == "matrix-chain":
        inst = problems.encode_matrix_chain(_sequence(params, "dims", rng, n + 1, 1, 30))
    elif problem == "optimal-bst":
        inst = problems.encode_optimal_bst(_sequence(params, "freq", rng, n, 1, 9))
    elif problem == "triangulation":
        inst = problems.encode_polygon_triangulation(_sequence(params, "weights", rng, n, 1, 9))
    elif problem in ("kminip", "kov"):
        lo, hi = (0, 1) if problem == "kov" else (-3, 3)
        src = reductions.MinIpInstance.random(k, n, d, lo, hi, rng)
        out = src.to_json()
        out["problem"] = problem
        return out
    elif problem == "sat":
        return reductions.SatFormula.random(n, int(params.get("m", 2 * n)), int(params.get("width", 3)), rng).to_json()
    elif problem == "negtriangle":
        return reductions.WeightedGraph.random(n, float(params.get("p", 0.7)), -10, 10, rng).to_json()
    else:
        raise SchemaError(f"unknown problem {problem!r}")
    out = instance_to_json(inst)
    if decode:
        out["decode"] = decode
    return out


GEN_PROBLEMS = ["lws", "kdlws", "rank1-kdlws", "cp-kdlws", "slicerank1-kdlws", "slicerank1-2dlws", "pt",
                "interval2d", "lis", "refuel", "arrival-fee", "nested-boxes", "matrix-chain", "optimal-bst",
                "triangulation", "kminip", "kov", "sat", "negtriangle"]


def _write_json(obj, path):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_json(path) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        d = json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(str(e)) from e
    if not isinstance(d, dict) or d.get("schema") != SCHEMA:
        raise SchemaError(f"expected a {SCHEMA!r} document")
    return d


def cmd_gen(args) -> int:
    _write_json(build(args.problem, args.n, args.k, args.d, args.seed, _params(args.param)), args.out)
    return 0


# ----------------------------------------------------------------------------
# solve

def _decode(doc: dict, value):
    rule = doc.get("decode")
    if rule == "negate":
        return problems.decode_lis(value)
    if rule == "boxes":
        return problems.decode_nested_boxes(value)
    return value


def _load_instance(doc: dict):
    try:
        return instance_from_json(doc)
    except (KeyError, TypeError, IndexError) as e:
        raise SchemaError(f"malformed instance: {e}") from e


def cmd_solve(args) -> int:
    if args.inp:
        doc = _read_json(args.inp)
    elif args.problem:
        params = _params(args.param)
        for key in ("dims", "seq", "freq", "weights", "stops"):
            if getattr(args, key, None):
                params[key] = getattr(args, key)
        n = len(_ints(params["dims"])) - 1 if "dims" in params else args.n
        doc = build(args.problem, n, args.k, args.d, args.seed, params)
    else:
        raise SchemaError("give --in FILE or --problem NAME")
    inst = _load_instance(doc)
    t0 = time.perf_counter_ns()
    value = run_solver(inst, args.solver)
    dt = time.perf_counter_ns() - t0
    print(_fmt(_decode(doc, value)))
    print(f"# solver={args.solver} nanos={dt}")
    return 0


# ----------------------------------------------------------------------------
# reduce

def cmd_reduce(args) -> int:
    doc = _read_json(args.inp)
    pair = (args.src, args.dst)
    if pair in (("2dlws", "pt"), ("2dlws", "pt-slice"), ("interval2d", "pt"), ("interval2d", "pt-slice")):
        src = _load_instance(doc)
        if not isinstance(src, Interval2dInstance):
            raise SchemaError("expected an interval2d instance")
        slice_form = args.dst == "pt-slice"
        tgt = (reductions.encode_2dlws_as_pt_slicerank if slice_form else reductions.encode_2dlws_as_pt)(src)
        out = instance_to_json(tgt)
        cert = reductions.certify_2dlws_pt(src, slice_form) if args.certify else None
    else:
        try:
            src = reductions.source_from_json(doc)
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed source: {e}") from e
        if pair in (("kminip", "kdlws"), ("kov", "kdlws")):
            out = instance_to_json(reductions.encode_kminip_as_kdlws(src))
            cert = reductions.certify_kminip(src) if args.certify else None
        elif pair == ("negtriangle", "2dlws"):
            out = instance_to_json(reductions.encode_negtriangle_as_2dlws(src))
            out["decode_big"] = reductions.negtriangle_big(src)
            cert = reductions.certify_negtriangle(src) if args.certify else None
        elif pair == ("sat", "kov"):
            out = reductions.sat_to_kov(src, args.k).to_json()
            out["problem"] = "kov"
            cert = reductions.certify_sat(src, args.k) if args.certify else None
        elif pair == ("kov", "zkov"):
            codec, family = reductions.kov_to_zkov_family(src, args.l)
            out = {"schema": SCHEMA, "problem": "zkov-family", "b": codec.b, "l": codec.l, "k": codec.k,
                   "members": [{"t": t, "sets": [[list(v) for v in s] for s in m.sets]} for t, m in family]}
            cert = reductions.certify_zkov(src, args.l) if args.certify else None
        else:
            raise SchemaError(f"no reduction from {args.src} to {args.dst}")
    if args.out:
        _write_json(out, args.out)
    if cert is not None:
        print(cert)
        return 0 if cert.ok else EXIT_MISMATCH
    return 0


# ----------------------------------------------------------------------------
# verify

def _check_pt(n, seed, solver):
    inst = gen_mod.random_pt(n, seed)
    return run_solver(inst, solver), oracles.brute_triangulations(inst)


def _check_lis(n, seed, solver):
    xs = np.random.default_rng(seed).integers(0, n + 1, n).tolist()
    return problems.decode_lis(run_solver(problems.encode_lis(xs), solver)), oracles.lis_patience(xs)


def _check_refuel(n, seed, solver):
    rng = np.random.default_rng(seed)
    xs = sorted(rng.choice(8 * n + 8, n + 1, replace=False).tolist())
    hop = int(rng.integers(0, 10))
    return run_solver(problems.encode_refuel_1d(xs, hop), solver), oracles.brute_refuel(xs, hop)


def _check_boxes(n, seed, solver):
    rng = np.random.default_rng(seed)
    boxes = rng.integers(1, 4, (min(n, 6), 3)).tolist()
    got = problems.decode_nested_boxes(run_solver(problems.encode_nested_boxes(boxes, 2), solver))
    return got, oracles.brute_nested_boxes(boxes, 2)


def _check_chain(n, seed, solver):
    dims = np.random.default_rng(seed).integers(1, 20, n + 1).tolist()
    return run_solver(problems.encode_matrix_chain(dims), solver), oracles.brute_matrix_chain(dims)


def _check_bst(n, seed, solver):
    p = np.random.default_rng(seed).integers(1, 10, n).tolist()
    return run_solver(problems.encode_optimal_bst(p), solver), oracles.brute_optimal_bst(p)


def _check_arrival(n, seed, solver):
    c = np.random.default_rng(seed).integers(0, 9, (n, n))
    got = run_solver(problems.encode_refuel_arrival_fee(2, n, c), solver)
    return got, oracles.brute_grid_paths(2, n, lambda i, j: int(c[i - 1, j - 1]))


def _check_kd(builder):
    def check(n, seed, solver):
        inst = builder(n, seed)
        return run_solver(inst, solver), solve_kdlws_naive(inst)[1]
    return check


def _check_kminip(n, seed, solver):
    src = reductions.MinIpInstance.random(3, n, 2, -3, 3, np.random.default_rng(seed))
    return run_solver(reductions.encode_kminip_as_kdlws(src), solver), oracles.brute_kminip(src)


def _check_negtriangle(n, seed, solver):
    g = reductions.WeightedGraph.random(max(n, 3), 0.7, -10, 10, np.random.default_rng(seed))
    raw = run_solver(reductions.encode_negtriangle_as_2dlws(g), solver)
    return reductions.decode_negtriangle(g, raw), oracles.brute_negative_triangle(g)


VERIFY = {
    "pt": _check_pt,
    "lis": _check_lis,
    "refuel": _check_refuel,
    "nested-boxes": _check_boxes,
    "matrix-chain": _check_chain,
    "optimal-bst": _check_bst,
    "arrival-fee": _check_arrival,
    "kminip": _check_kminip,
    "negtriangle": _check_negtriangle,
    "kdlws": _check_kd(lambda n, s: gen_mod.random_kdlws(2, n, s)),
    "rank1-kdlws": _check_kd(lambda n, s: gen_mod.random_rank1_kdlws(2, n, s)),
    "slicerank1-2dlws": _check_kd(lambda n, s: gen_mod.random_slicerank1_kdlws(2, n, s)),
}


def cmd_verify(args) -> int:
    check = VERIFY.get(args.problem)
    if check is None:
        raise SchemaError(f"cannot verify {args.problem!r}; choose from {sorted(VERIFY)}")
    fails = 0
    for seed in range(args.seed, args.seed + args.seeds):
        got, want = check(args.n, seed, args.solver)
        if got != want:
            fails += 1
            print(f"seed {seed}: solver {_fmt(got)} oracle {_fmt(want)}")
    status = "PASS" if fails == 0 else "FAIL"
    print(f"{status} {args.problem} n={args.n} solver={args.solver} seeds={args.seeds} mismatches={fails}")
    return 0 if fails == 0 else EXIT_MISMATCH


# ----------------------------------------------------------------------------
# bench

BENCH_PROBLEMS = {
    "slicerank1-2dlws": (2, gen_mod.bench_slicerank1_2d),
    "arrival-fee": (2, lambda n, seed: problems.encode_refuel_arrival_fee(
        2, n, np.random.default_rng(seed).integers(0, 1000, (n, n)))),
}
BENCH_SOLVERS = {"naive": "compiled-naive", "fast": "fast", "reference": "naive", "dc": "slicerank1"}


def _time_cell(problem: str, solver: str, n: int, seed: int, reps: int):
    k, builder = BENCH_PROBLEMS[problem]
    inst = builder(n, seed)
    name = BENCH_SOLVERS.get(solver, solver)
    run_solver(builder(min(n, 128), seed), name)  # compile and load kernels outside the timed region
    times = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        ans = run_solver(inst, name)
        times.append(time.perf_counter_ns() - t0)
    return {"problem": problem, "solver": solver, "k": k, "n": n, "seed": seed,
            "nanos": int(np.median(times)), "answer": _fmt(ans)}


def fit_exponent(ns, times) -> float:
    """Least-squares slope of log(time) against log(n)."""
    return float(np.polyfit(np.log(ns), np.log(times), 1)[0])


def run_bench(problem: str, grid, solvers, seed: int = 0, reps: int = 5, jobs: int = 1) -> list[dict]:
    cells = [(problem, s, n, seed, reps) for s in solvers for n in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_time_cell, *zip(*cells)))
    return [_time_cell(*c) for c in cells]


def cmd_bench(args) -> int:
    if args.problem not in BENCH_PROBLEMS:
        raise SchemaError(f"cannot bench {args.problem!r}; choose from {sorted(BENCH_PROBLEMS)}")
    grid = _ints(args.grid)
    solvers = [s for s in args.solvers.split(",") if s]
    rows = run_bench(args.problem, grid, solvers, args.seed, args.reps, args.jobs)
    fields = ["problem", "solver", "k", "n", "seed", "nanos", "answer"]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.csv:
            out.close()
    by = {s: {r["n"]: r["nanos"] for r in rows if r["solver"] == s} for s in solvers}
    slopes = {s: fit_exponent(grid, [by[s][n] for n in grid]) if len(grid) > 1 else math.nan for s in solvers}
    for s in solvers:
        print(f"# exponent {s} {slopes[s]:.3f}", file=sys.stderr if not args.csv else sys.stdout)
    if args.dat:
        with open(args.dat, "w") as f:
            f.write("# n " + " ".join(f"{s}_seconds" for s in solvers) + "\n")
            f.write("# exponents " + " ".join(f"{s}={slopes[s]:.3f}" for s in solvers) + "\n")
            for n in grid:
                f.write(f"{n} " + " ".join(f"{by[s][n] / 1e9:.6f}" for s in solvers) + "\n")
    return 0


# ----------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lwskit", description="LWS solvers, reductions and benchmarks")
    sub = p.add_subparsers(dest="cmd", required=True)

    def shape(sp, n=8):
        sp.add_argument("--n", type=int, default=n)
        sp.add_argument("--k", type=int, default=2)
        sp.add_argument("--d", type=int, default=2)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--param", action="append", metavar="KEY=VALUE")

    g = sub.add_parser("gen", help="write a random or parametrized instance")
    g.add_argument("--problem", required=True, choices=GEN_PROBLEMS)
    g.add_argument("--out", default="-")
    shape(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file or an inline application")
    s.add_argument("--in", dest="inp")
    s.add_argument("--problem", choices=GEN_PROBLEMS)
    s.add_argument("--solver", default="naive")
    for key in ("dims", "seq", "freq", "weights", "stops"):
        s.add_argument(f"--{key}")
    shape(s)
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("reduce", help="apply a reduction, optionally certifying it")
    r.add_argument("--from", dest="src", required=True)
    r.add_argument("--to", dest="dst", required=True)
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out")
    r.add_argument("--certify", action="store_true")
    r.add_argument("--k", type=int, default=2, help="arity for sat -> kov")
    r.add_argument("--l", type=int, default=4, help="block count for kov -> zkov")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="compare a solver with the brute force oracle")
    v.add_argument("--problem", required=True)
    v.add_argument("--n", type=int, default=6)
    v.add_argument("--seeds", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--solver", default="naive")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time solvers over a grid of sizes")
    b.add_argument("--problem", default="slicerank1-2dlws")
    b.add_argument("--grid", default="256,512,1024,2048")
    b.add_argument("--solvers", default="naive,fast")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv")
    b.add_argument("--dat")
    b.add_argument("--jobs", type=int, default=1,
                   help="worker processes; each (solver, n) cell runs whole inside one worker")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except BudgetError as e:
        print(f"budget: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as e:
        print(f"precondition: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OverflowError as e:
        print(f"overflow: {e}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
