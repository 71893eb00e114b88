"""Scaling benchmark: time the solvers on a fixed, seeded instance suite."""

from __future__ import annotations

import csv
import math
import random
import sys
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, TextIO

from . import generate
from .exact import brute_force_solve, count_guesses, solve_exact
from .facility import brute_force_fl, solve_fl
from .metric import Objective

HEADER = ("n", "k", "algorithm", "elapsed_ms", "guesses_explored", "cost")
BOUND_COLUMNS = ("count_guesses", "bound")

MATCHING_RANGE = (6, 16)
FL_RANGE = (6, 20)
FL_FACILITIES = 6
BRUTE_MAX_N = 16


@dataclass
class BenchRow:
    n: int
    k: int
    algorithm: str
    elapsed_ms: int
    guesses_explored: Optional[int]
    cost: int


def subset_bound(n: int) -> int:
    """Number of center sets of size at most n/3."""
    return sum(math.comb(n, i) for i in range(n // 3 + 1))


def guess_bound(n: int, k: int) -> int:
    return (k + 1) ** 2 * subset_bound(n)


def bench_k(n: int) -> int:
    return max(2, n // 4)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, int(round((time.perf_counter() - t0) * 1000))


def matching_rows(n: int, seed: int, algorithms: Iterable[str], workers: int = 1) -> list[BenchRow]:
    rng = random.Random(f"{seed}:kmed:{n}")
    # distinct grid points and k < n keep every optimum positive, so the
    # matching solver never stops early and explores every guess
    inst = generate.grid_l1(n, rng, side=2 * n, distinct=True)
    k = bench_k(n)
    obj = Objective.median()
    rows = []
    for alg in algorithms:
        if alg == "matching":
            res, ms = _timed(lambda: solve_exact(inst, k, obj, workers=workers))
            rows.append(BenchRow(n, k, "matching", ms, res.stats.guesses_explored, res.cost))
        elif alg == "brute" and n <= BRUTE_MAX_N:
            (_, cost), ms = _timed(lambda: brute_force_solve(inst, k, obj))
            rows.append(BenchRow(n, k, "brute", ms, None, cost))
    return rows


def fl_rows(n: int, seed: int, algorithms: Iterable[str]) -> list[BenchRow]:
    rng = random.Random(f"{seed}:fl:{n}")
    k = 3
    inst = generate.random_fl(n, FL_FACILITIES, k, rng, max_distance=3)
    rows = []
    for alg in algorithms:
        if alg == "conv":
            res, ms = _timed(lambda: solve_fl(inst))
            rows.append(BenchRow(n, k, "conv", ms, None, res.cost))
        elif alg == "fl-brute":
            (_, cost), ms = _timed(lambda: brute_force_fl(inst))
            rows.append(BenchRow(n, k, "fl-brute", ms, None, cost))
    return rows


def run_bench(
    out: TextIO,
    suites: Iterable[str] = ("matching", "fl"),
    min_n: Optional[int] = None,
    max_n: Optional[int] = None,
    seed: int = 0,
    workers: int = 1,
    with_bound: bool = False,
    algorithms: Optional[Iterable[str]] = None,
    log: Optional[TextIO] = sys.stderr,
) -> list[BenchRow]:
    """Write CSV rows to ``out`` as they complete and return them."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER + (BOUND_COLUMNS if with_bound else ()))
    rows: list[BenchRow] = []
    algs = set(algorithms) if algorithms else {"matching", "brute", "conv", "fl-brute"}
    for suite in suites:
        lo, hi = MATCHING_RANGE if suite == "matching" else FL_RANGE
        lo = max(lo, min_n) if min_n is not None else lo
        hi = min(hi, max_n) if max_n is not None else hi
        for n in range(lo, hi + 1):
            if suite == "matching":
                batch = matching_rows(n, seed, [a for a in ("matching", "brute") if a in algs], workers)
            else:
                batch = fl_rows(n, seed, [a for a in ("conv", "fl-brute") if a in algs])
            for row in batch:
                line = [row.n, row.k, row.algorithm, row.elapsed_ms,
                        "" if row.guesses_explored is None else row.guesses_explored, row.cost]
                if with_bound:
                    if row.algorithm == "matching":
                        line += [count_guesses(row.n, row.k), guess_bound(row.n, row.k)]
                    else:
                        line += ["", ""]
                writer.writerow(line)
                out.flush()
                if log is not None and row.algorithm == "matching":
                    print(f"# n={row.n} k={row.k} guesses={row.guesses_explored} "
                          f"subsets<=n/3={subset_bound(row.n)} 1.89^n={1.89 ** row.n:.0f}", file=log)
                rows.append(row)
    return rows


def rows_as_dicts(rows: list[BenchRow]) -> list[dict]:
    return [asdict(r) for r in rows]
