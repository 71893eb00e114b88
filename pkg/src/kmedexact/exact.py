"""Exact k-Median / k-Means via guessed large-cluster centers and perfect matching.

For a fixed optimal clustering, call clusters of size 1, 2 and >= 3 type 1,
2 and 3.  Guessing the counts ``(k1, k2, k3)`` and the type-3 centers leaves
a residual problem that is a minimum-weight perfect matching on an
auxiliary graph:

* ``W``: ``s`` copies of every guessed center, ``s = n - k3 - 2*k2 - k1``
* ``Y``: the points that are not guessed centers
* ``U``: ``k1`` isolation vertices, joined to ``Y`` at weight 0
* ``Z``: ``s*(k3-1)`` filler vertices, joined to ``W`` at weight 0

``Y``-``W`` edges cost the point-to-center distance and ``Y``-``Y`` edges
the pair distance.  Every perfect matching decodes to a clustering into
exactly ``k`` nonempty clusters of the same cost, and the right guess
attains the optimum, so the minimum over guesses is exact.  Only type-3
center sets of size <= n/3 are ever guessed.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .matching import Matching, WeightedGraph, min_weight_perfect_matching
from .metric import (
    CapacityError,
    Clustering,
    MetricInstance,
    Objective,
    effective_distance,
    evaluate_cost,
    nearest_assignment,
)

__all__ = [
    "Guess",
    "Role",
    "AuxGraph",
    "SolveStats",
    "ExactResult",
    "UnsupportedObjective",
    "InvariantViolation",
    "enumerate_guesses",
    "count_guesses",
    "guess_shapes",
    "build_auxiliary_graph",
    "decode_matching",
    "solve_exact",
    "brute_force_solve",
    "BRUTE_FORCE_MAX_POINTS",
]

BRUTE_FORCE_MAX_POINTS = 16


class UnsupportedObjective(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (a bug, not bad input)."""


@dataclass(frozen=True)
class Guess:
    k1: int
    k2: int
    k3: int
    centers: tuple[int, ...]
    n: int

    @property
    def k(self) -> int:
        return self.k1 + self.k2 + self.k3

    @property
    def s(self) -> int:
        return self.n - self.k3 - 2 * self.k2 - self.k1


def _shape_is_valid(n: int, k1: int, k2: int, k3: int) -> bool:
    s = n - k3 - 2 * k2 - k1
    if k3 == 0:
        return s == 0
    return s >= 2 * k3


def guess_shapes(n: int, k: int, prune: bool = True) -> list[tuple[int, int, int]]:
    """All ``(k1, k2, k3)`` with ``k1 + k2 + k3 = k``, ordered by ``(k3, k2)``.

    With ``prune=False`` every shape whose graph is well defined (``s >= 0``,
    and ``s = 0`` when ``k3 = 0``) is kept; those extra shapes never beat the
    pruned optimum but are useful for checking exactly that.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    out = []
    for k3 in range(k + 1):
        for k2 in range(k - k3 + 1):
            k1 = k - k3 - k2
            s = n - k3 - 2 * k2 - k1
            if prune:
                ok = _shape_is_valid(n, k1, k2, k3)
            else:
                ok = s == 0 if k3 == 0 else s >= 0
            if ok:
                out.append((k1, k2, k3))
    return out


def _subsets_by_mask(n: int, r: int) -> Iterator[tuple[int, ...]]:
    """r-subsets of range(n) in increasing bitmask order (Gosper's hack)."""
    if r == 0:
        yield ()
        return
    if r > n:
        return
    mask = (1 << r) - 1
    limit = 1 << n
    while mask < limit:
        yield tuple(i for i in range(n) if mask >> i & 1)
        low = mask & -mask
        ripple = mask + low
        mask = (((ripple ^ mask) >> 2) // low) | ripple


def enumerate_guesses(n: int, k: int, prune: bool = True) -> Iterator[Guess]:
    for k1, k2, k3 in guess_shapes(n, k, prune):
        for centers in _subsets_by_mask(n, k3):
            yield Guess(k1, k2, k3, centers, n)


def count_guesses(n: int, k: int, prune: bool = True) -> int:
    return sum(math.comb(n, k3) for _, _, k3 in guess_shapes(n, k, prune))


@dataclass(frozen=True)
class Role:
    """What an auxiliary vertex stands for.

    ``kind`` is ``"W"`` (``index`` = center rank, ``copy`` = copy number),
    ``"Y"`` (``index`` = point), ``"U"`` or ``"Z"`` (``index`` = ordinal).
    """

    kind: str
    index: int
    copy: int = 0


@dataclass(frozen=True)
class AuxGraph:
    graph: WeightedGraph
    roles: tuple[Role, ...]
    # For Y-Y edges in asymmetric mode: which endpoint serves as center.
    pair_center: dict[tuple[int, int], int] = field(default_factory=dict, compare=False)


def _pair_cost(inst: MetricInstance, a: int, b: int, obj: Objective) -> tuple[int, int]:
    """Cheapest way to serve pair {a, b} from one of them: (cost, center), a < b."""
    ab = effective_distance(inst, a, b, obj)  # a served by b
    if inst.symmetric:
        return ab, a
    ba = effective_distance(inst, b, a, obj)
    return (ba, a) if ba <= ab else (ab, b)


def build_auxiliary_graph(inst: MetricInstance, g: Guess, obj: Objective) -> AuxGraph:
    if not obj.is_sum:
        raise UnsupportedObjective("the matching solver handles sum objectives only")
    n, s, k3, k1 = inst.n, g.s, g.k3, g.k1
    if g.n != n:
        raise ValueError("guess was made for a different point count")
    if s < 0 or (k3 == 0 and s != 0) or len(g.centers) != k3:
        raise ValueError(f"invalid guess {g}")
    centers = g.centers
    center_set = set(centers)
    ys = [p for p in range(n) if p not in center_set]
    nw = s * k3
    nz = s * (k3 - 1) if k3 >= 1 else 0
    y0 = nw
    u0 = y0 + len(ys)
    z0 = u0 + k1
    v = z0 + nz

    roles = [Role("W", j, h) for j in range(k3) for h in range(s)]
    roles += [Role("Y", p) for p in ys]
    roles += [Role("U", i) for i in range(k1)]
    roles += [Role("Z", i) for i in range(nz)]

    edges: list[tuple[int, int, int]] = []
    to_center = [[effective_distance(inst, y, c, obj) for y in ys] for c in centers]
    for j in range(k3):
        row = to_center[j]
        for h in range(s):
            wv = j * s + h
            edges.extend((wv, y0 + t, row[t]) for t in range(len(ys)))
            edges.extend((wv, z, 0) for z in range(z0, v))
    pair_center = {}
    for t, a in enumerate(ys):
        for t2 in range(t + 1, len(ys)):
            cost, ctr = _pair_cost(inst, a, ys[t2], obj)
            edges.append((y0 + t, y0 + t2, cost))
            if not inst.symmetric:
                pair_center[(a, ys[t2])] = ctr
        edges.extend((y0 + t, u, 0) for u in range(u0, z0))
    return AuxGraph(WeightedGraph(v, tuple(edges)), tuple(roles), pair_center)


def decode_matching(g: Guess, aux: AuxGraph, m: Matching, inst: MetricInstance) -> Clustering:
    """Turn a perfect matching of the auxiliary graph into a k-clustering."""
    graph = aux.graph
    if not m.is_perfect(graph):
        raise ValueError("matching is not perfect")
    members: dict[int, list[int]] = {c: [c] for c in g.centers}
    for e in m.edges:
        a, b, _ = graph.edges[e]
        ra, rb = aux.roles[a], aux.roles[b]
        if ra.kind > rb.kind:
            ra, rb = rb, ra
        # kinds sort as U < W < Y < Z
        if ra.kind == "U" and rb.kind == "Y":
            members[rb.index] = [rb.index]
        elif ra.kind == "W" and rb.kind == "Y":
            members[g.centers[ra.index]].append(rb.index)
        elif ra.kind == "Y" and rb.kind == "Y":
            p, q = sorted((ra.index, rb.index))
            center = aux.pair_center.get((p, q), p)
            members[center] = [p, q]
        elif ra.kind == "W" and rb.kind == "Z":
            continue
        else:
            raise InvariantViolation(f"unexpected matched edge {ra.kind}-{rb.kind}")
    centers = sorted(members)
    return Clustering.from_clusters(inst.n, centers, [sorted(members[c]) for c in centers])


@dataclass
class SolveStats:
    guesses_explored: int = 0
    matcher_calls: int = 0
    best_guess: Optional[Guess] = None


@dataclass
class ExactResult:
    clustering: Clustering
    cost: int
    stats: SolveStats


def _solve_guess(inst: MetricInstance, g: Guess, obj: Objective) -> Optional[Matching]:
    aux = build_auxiliary_graph(inst, g, obj)
    return min_weight_perfect_matching(aux.graph)


def _scan(inst: MetricInstance, obj: Objective, guesses: list[tuple[int, Guess]]):
    """Best (weight, rank, guess, matching) over a chunk; stops at weight 0."""
    best = None
    for rank, g in guesses:
        m = _solve_guess(inst, g, obj)
        if m is None:
            raise InvariantViolation(f"auxiliary graph for {g} has no perfect matching")
        if best is None or m.weight < best[0]:
            best = (m.weight, rank, g, m)
            if m.weight == 0:
                break
    return best


def solve_exact(
    inst: MetricInstance,
    k: int,
    obj: Objective = Objective.median(),
    workers: int = 1,
    prune: bool = True,
    chunk_size: int = 64,
) -> ExactResult:
    """Optimal clustering into exactly ``k`` nonempty clusters.

    Ties between guesses go to the earliest in enumeration order, so the
    answer does not depend on ``workers``.  A zero-cost guess ends the
    search; ``guesses_explored`` then counts guesses up to and including it.
    """
    if not obj.is_sum:
        raise UnsupportedObjective("k-Center is not solved by the matching algorithm")
    n = inst.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    ranked = enumerate(enumerate_guesses(n, k, prune))
    best = None
    if workers <= 1:
        best = _scan(inst, obj, list(ranked))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = []
            while True:
                chunk = list(itertools.islice(ranked, chunk_size))
                if not chunk:
                    break
                futures.append(pool.submit(_scan, inst, obj, chunk))
            for fut in futures:
                res = fut.result()
                if res is not None and (best is None or (res[0], res[1]) < (best[0], best[1])):
                    best = res
                if best is not None and best[0] == 0:
                    for f in futures:
                        f.cancel()
                    break
    if best is None:
        raise InvariantViolation("no guess produced a matching")
    weight, rank, g, m = best
    total = count_guesses(n, k, prune)
    explored = rank + 1 if weight == 0 else total
    aux = build_auxiliary_graph(inst, g, obj)
    clustering = decode_matching(g, aux, m, inst)
    cost = evaluate_cost(inst, clustering, obj)
    if cost != weight:
        raise InvariantViolation(f"decoded cost {cost} != matching weight {weight}")
    return ExactResult(clustering, cost, SolveStats(explored, explored, g))


def brute_force_solve(inst: MetricInstance, k: int, obj: Objective = Objective.median()) -> tuple[Clustering, int]:
    """Enumerate all C(n, k) center sets with nearest assignment (any objective)."""
    n = inst.n
    if n > BRUTE_FORCE_MAX_POINTS:
        raise CapacityError(f"brute force supports at most {BRUTE_FORCE_MAX_POINTS} points")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    eff = [[effective_distance(inst, p, c, obj) for c in range(n)] for p in range(n)]
    reduce = sum if obj.is_sum else max
    best_cost, best_centers = None, None
    for centers in itertools.combinations(range(n), k):
        cost = reduce(min(eff[p][c] for c in centers) for p in range(n))
        if best_cost is None or cost < best_cost:
            best_cost, best_centers = cost, centers
    clustering = nearest_assignment(inst, best_centers, obj)
    return clustering, evaluate_cost(inst, clustering, obj)
