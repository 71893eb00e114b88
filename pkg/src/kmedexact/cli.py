"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 infeasible / capacity / unsupported,
3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from typing import Optional, Sequence

from . import bench, generate
from .exact import (
    BRUTE_FORCE_MAX_POINTS,
    InvariantViolation,
    UnsupportedObjective,
    brute_force_solve,
    build_auxiliary_graph,
    count_guesses,
    decode_matching,
    enumerate_guesses,
    solve_exact,
)
from .facility import (
    FLInstance,
    InfeasibleError,
    brute_force_fl,
    fl_cost,
    min_sum_convolve,
    naive_min_sum_convolve,
    solve_fl,
)
from .formats import KMedFile, ParseError, format_value, parse_instance
from .matching import WeightedGraph, brute_force_perfect_matching, min_weight_perfect_matching
from .metric import CapacityError, MetricInstance, Objective, evaluate_cost
from .reductions import (
    ReductionError,
    SetSystem,
    SimpleGraph,
    check_domset_property,
    check_setcover_property,
    domset_to_kmedian,
    setcover_to_fl,
)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _expect(value, kind, path: str):
    if not isinstance(value, kind):
        raise CliError(f"{path}: expected a {kind.__name__} file, got {type(value).__name__}", EXIT_INPUT)
    return value


def _record(cost, centers, clusters, objective, algorithm, guesses, elapsed_ms) -> dict:
    return {
        "cost": cost,
        "centers": list(centers),
        "clusters": [list(c) for c in clusters],
        "objective": objective,
        "algorithm": algorithm,
        "guesses_explored": guesses,
        "elapsed_ms": elapsed_ms,
    }


def _emit(record: dict, as_json: bool, out) -> None:
    if as_json:
        out.write(json.dumps(record) + "\n")
        return
    out.write(f"cost: {record['cost']}\n")
    out.write(f"objective: {record['objective']}  algorithm: {record['algorithm']}\n")
    if record["guesses_explored"] is not None:
        out.write(f"guesses explored: {record['guesses_explored']}\n")
    for c, members in zip(record["centers"], record["clusters"]):
        out.write(f"  center {c}: {' '.join(map(str, members))}\n")
    out.write(f"elapsed: {record['elapsed_ms']} ms\n")


def _default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def solve_record(inst: MetricInstance, k: int, obj: Objective, algorithm: str, threads: int = 1) -> dict:
    t0 = time.perf_counter()
    if algorithm == "matching":
        # Only fan out when the guess stream is long enough to amortize workers.
        workers = threads if count_guesses(inst.n, k) >= 2000 else 1
        res = solve_exact(inst, k, obj, workers=workers)
        cl, cost, guesses = res.clustering, res.cost, res.stats.guesses_explored
    elif algorithm == "brute":
        cl, cost = brute_force_solve(inst, k, obj)
        guesses = None
    else:
        raise CliError(f"unknown algorithm {algorithm!r}", EXIT_INPUT)
    ms = int(round((time.perf_counter() - t0) * 1000))
    if evaluate_cost(inst, cl, obj) != cost:
        raise InvariantViolation("reported cost does not match the clustering")
    return _record(cost, cl.centers, cl.clusters(), obj.name, algorithm, guesses, ms)


def fl_record(inst: FLInstance, obj: Objective, algorithm: str) -> dict:
    t0 = time.perf_counter()
    if algorithm == "conv":
        res = solve_fl(inst, min_sum_convolve)
        cl, cost = res.clustering, res.cost
    elif algorithm == "naive-conv":
        res = solve_fl(inst, naive_min_sum_convolve)
        cl, cost = res.clustering, res.cost
    elif algorithm == "brute":
        cl, cost = brute_force_fl(inst)
    else:
        raise CliError(f"unknown algorithm {algorithm!r}", EXIT_INPUT)
    ms = int(round((time.perf_counter() - t0) * 1000))
    if fl_cost(inst, cl) != cost:
        raise InvariantViolation("reported cost does not match the clustering")
    return _record(cost, cl.facilities, cl.clusters(), obj.name, algorithm, None, ms)


def cmd_solve(args, out) -> int:
    parsed = _expect(parse_instance(args.file), KMedFile, args.file)
    k = args.k if args.k is not None else parsed.k
    obj = Objective.parse(args.objective)
    _emit(solve_record(parsed.instance, k, obj, args.algorithm, args.threads), args.json, out)
    return EXIT_OK


def cmd_fl_solve(args, out) -> int:
    raw = _expect(parse_instance(args.file), FLInstance, args.file)
    obj = Objective.parse(args.objective)
    k = args.k if args.k is not None else raw.k
    inst = FLInstance.from_distances(raw.dist, k, obj)
    _emit(fl_record(inst, obj, args.algorithm), args.json, out)
    return EXIT_OK


def _write(value, path: Optional[str], out) -> None:
    text = format_value(value)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_gen(args, out) -> int:
    rng = random.Random(args.seed)
    if args.kind == "random":
        if args.asym:
            inst = generate.asymmetric(args.n, rng)
        else:
            inst = generate.random_instance(args.model, args.n, rng)
        value = KMedFile(inst, args.k)
    elif args.kind == "domset":
        if args.graph:
            g = _expect(parse_instance(args.graph), SimpleGraph, args.graph)
        else:
            g = generate.connected_graph(args.n, rng)
        value = KMedFile(domset_to_kmedian(g), args.k)
    elif args.kind == "setcover":
        if args.sets:
            s = _expect(parse_instance(args.sets), SetSystem, args.sets)
        else:
            s = generate.covering_system(args.n, args.m, args.k, rng)
        if args.k is not None:
            s = SetSystem(s.n, s.sets, args.k)
        value = setcover_to_fl(s)
    elif args.kind == "graph":
        value = generate.connected_graph(args.n, rng, args.p)
    elif args.kind == "sets":
        value = generate.covering_system(args.n, args.m, args.k, rng)
    elif args.kind == "fl":
        value = generate.random_fl(args.n, args.m, args.k, rng, args.max_distance)
    else:
        raise CliError(f"unknown generator {args.kind!r}", EXIT_INPUT)
    _write(value, args.output, out)
    return EXIT_OK


def _verify_kmed(parsed: KMedFile, obj: Objective, lines: list[str]) -> bool:
    inst, k = parsed.instance, parsed.k
    ok = True
    ks = range(1, inst.n + 1) if inst.n <= 10 else [k]
    for kk in ks:
        fast = solve_exact(inst, kk, obj)
        line = f"k={kk} matching={fast.cost}"
        if inst.n <= BRUTE_FORCE_MAX_POINTS:
            _, slow = brute_force_solve(inst, kk, obj)
            line += f" brute={slow}"
            ok &= fast.cost == slow
        lines.append(line)
    if inst.n <= 8:
        checked = 0
        for g in enumerate_guesses(inst.n, k):
            aux = build_auxiliary_graph(inst, g, obj)
            m = min_weight_perfect_matching(aux.graph)
            if m is None:
                ok = False
                lines.append(f"guess {g}: no perfect matching")
                continue
            cl = decode_matching(g, aux, m, inst)
            if evaluate_cost(inst, cl, obj) != m.weight:
                ok = False
                lines.append(f"guess {g}: decode cost != matching weight")
            if aux.graph.v <= 20:
                ref = brute_force_perfect_matching(aux.graph)
                if ref is None or ref.weight != m.weight:
                    ok = False
                    lines.append(f"guess {g}: blossom != oracle")
            checked += 1
        lines.append(f"lemma checks on {checked} guesses for k={k}")
    return ok


def _verify_fl(inst: FLInstance, lines: list[str]) -> bool:
    a = solve_fl(inst, min_sum_convolve).cost
    b = solve_fl(inst, naive_min_sum_convolve).cost if inst.n <= 12 else a
    _, c = brute_force_fl(inst)
    lines.append(f"k={inst.k} conv={a} naive-conv={b} brute={c}")
    return a == b == c


def cmd_verify(args, out) -> int:
    parsed = parse_instance(args.file)
    lines: list[str] = []
    if isinstance(parsed, KMedFile):
        ok = _verify_kmed(parsed, Objective.parse(args.objective), lines)
    elif isinstance(parsed, FLInstance):
        ok = _verify_fl(parsed, lines)
    elif isinstance(parsed, SimpleGraph):
        ok = True
        for k in range(1, parsed.n + 1):
            rep = check_domset_property(parsed, k)
            lines.append(f"k={k} domset iff: {'ok' if rep.ok else 'FAIL'} {rep.details}")
            ok &= rep.ok
    elif isinstance(parsed, SetSystem):
        ok = True
        for k in range(1, parsed.m + 1):
            rep = check_setcover_property(SetSystem(parsed.n, parsed.sets, k))
            lines.append(f"k={k} setcover iff: {'ok' if rep.ok else 'FAIL'} {rep.details}")
            ok &= rep.ok
    elif isinstance(parsed, WeightedGraph):
        a = min_weight_perfect_matching(parsed)
        b = brute_force_perfect_matching(parsed)
        ok = (a is None) == (b is None) and (a is None or a.weight == b.weight)
        lines.append(f"blossom={a and a.weight} oracle={b and b.weight}")
    else:
        raise CliError("nothing to verify", EXIT_INPUT)
    for line in lines:
        out.write(line + "\n")
    out.write("verify: " + ("PASS" if ok else "FAIL") + "\n")
    return EXIT_OK if ok else EXIT_INTERNAL


def cmd_bench(args, out) -> int:
    suites = ("matching", "fl") if args.suite == "all" else (args.suite,)
    algorithms = args.algorithms.split(",") if args.algorithms else None
    sink = open(args.output, "w", encoding="utf-8", newline="") if args.output else out
    try:
        bench.run_bench(sink, suites, args.min_n, args.max_n, args.seed, args.threads,
                        args.with_bound, algorithms)
    finally:
        if args.output:
            sink.close()
    return EXIT_OK


def cmd_debug_match(args, out) -> int:
    g = _expect(parse_instance(args.file), WeightedGraph, args.file)
    m = min_weight_perfect_matching(g)
    if m is None:
        out.write("infeasible\n")
        return EXIT_INFEASIBLE
    out.write(json.dumps({"weight": m.weight, "pairs": m.pairs(g)}) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kmedexact", description="Exact k-Median / k-Means solvers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a KMED instance")
    s.add_argument("file")
    s.add_argument("--algorithm", choices=("matching", "brute"), default="matching")
    s.add_argument("--objective", default="median", help="median, means, center or power:Z")
    s.add_argument("--k", type=int, help="override k from the file")
    s.add_argument("--json", action="store_true")
    s.add_argument("--threads", type=int, default=_default_threads())
    s.set_defaults(func=cmd_solve)

    fl = sub.add_parser("fl", help="facility-location commands")
    flsub = fl.add_subparsers(dest="fl_command", required=True)
    fs = flsub.add_parser("solve", help="solve a KMEDFL instance")
    fs.add_argument("file")
    fs.add_argument("--algorithm", choices=("conv", "naive-conv", "brute"), default="conv")
    fs.add_argument("--objective", default="median", help="median, means or power:Z")
    fs.add_argument("--k", type=int, help="override k from the file")
    fs.add_argument("--json", action="store_true")
    fs.set_defaults(func=cmd_fl_solve)

    g = sub.add_parser("gen", help="generate instance files")
    g.add_argument("kind", choices=("random", "domset", "setcover", "graph", "sets", "fl"))
    g.add_argument("--model", choices=generate.MODELS, default="grid-l1")
    g.add_argument("--asym", action="store_true", help="random asymmetric table (gen random)")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--m", type=int, default=4)
    g.add_argument("--k", type=int)
    g.add_argument("--p", type=float, default=0.4, help="extra edge probability (gen graph)")
    g.add_argument("--max-distance", type=int, default=9)
    g.add_argument("--graph", help="GRAPH file for gen domset")
    g.add_argument("--sets", help="SETCOVER file for gen setcover")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="cross-check every applicable solver and oracle on one file")
    v.add_argument("file")
    v.add_argument("--objective", default="median")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run the scaling suite and print CSV")
    b.add_argument("--suite", choices=("matching", "fl", "all"), default="all")
    b.add_argument("--min-n", type=int)
    b.add_argument("--max-n", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--algorithms", help="comma list from matching,brute,conv,fl-brute")
    b.add_argument("--with-bound", action="store_true",
                   help="append count_guesses and (k+1)^2 * sum C(n,i<=n/3) columns")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("debug", help=argparse.SUPPRESS)
    dsub = d.add_subparsers(dest="debug_command", required=True)
    dm = dsub.add_parser("match")
    dm.add_argument("file")
    dm.set_defaults(func=cmd_debug_match)
    return p


def _fill_gen_defaults(args) -> None:
    if args.command != "gen":
        return
    if args.k is None and args.kind in ("random", "domset", "sets", "fl"):
        args.k = max(1, args.n // 3) if args.kind != "sets" else max(1, args.m // 2)
        if args.kind == "fl":
            args.k = max(1, args.m // 2)


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    _fill_gen_defaults(args)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InfeasibleError, CapacityError, UnsupportedObjective) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvariantViolation, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ParseError, ReductionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
