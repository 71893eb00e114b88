"""Seeded random instance models."""

from __future__ import annotations

import random

from .facility import FLInstance
from .metric import MetricInstance
from .reductions import SetSystem, SimpleGraph

MODELS = ("grid-l1", "closure")


def grid_l1(n: int, rng: random.Random, side: int | None = None, distinct: bool = False) -> MetricInstance:
    """Points on a ``side x side`` integer grid with L1 distances (a true metric)."""
    side = side or max(2, n)
    if distinct:
        if side * side < n:
            raise ValueError("grid too small for distinct points")
        cells = rng.sample(range(side * side), n)
        pts = [divmod(c, side) for c in cells]
    else:
        pts = [(rng.randrange(side), rng.randrange(side)) for _ in range(n)]
    return MetricInstance(tuple(
        tuple(abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts) for a in pts))


def closure(n: int, rng: random.Random, max_weight: int = 20) -> MetricInstance:
    """Random complete-graph weights in ``1..max_weight`` closed under shortest paths."""
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = rng.randint(1, max_weight)
    for t in range(n):
        dt = d[t]
        for i in range(n):
            dit = d[i][t]
            row = d[i]
            for j in range(n):
                if dit + dt[j] < row[j]:
                    row[j] = dit + dt[j]
    return MetricInstance(tuple(tuple(r) for r in d))


def random_instance(model: str, n: int, rng: random.Random, **kw) -> MetricInstance:
    if model == "grid-l1":
        return grid_l1(n, rng, **kw)
    if model == "closure":
        return closure(n, rng, **kw)
    raise ValueError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")


def asymmetric(n: int, rng: random.Random, max_weight: int = 20) -> MetricInstance:
    d = [[0 if i == j else rng.randint(0, max_weight) for j in range(n)] for i in range(n)]
    return MetricInstance(tuple(tuple(r) for r in d), symmetric=False)


def connected_graph(n: int, rng: random.Random, p: float = 0.4) -> SimpleGraph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < p:
                edges.add((u, v))
    return SimpleGraph(n, tuple(sorted(edges)))


def covering_system(n: int, m: int, k: int, rng: random.Random, density: float = 0.35) -> SetSystem:
    """``m`` nonempty random sets over ``n`` elements, patched so every element is covered."""
    sets = [set(x for x in range(n) if rng.random() < density) for _ in range(m)]
    for s in sets:
        if not s:
            s.add(rng.randrange(n))
    for x in range(n):
        if not any(x in s for s in sets):
            sets[rng.randrange(m)].add(x)
    return SetSystem(n, tuple(tuple(sorted(s)) for s in sets), k)


def random_fl(n: int, m: int, k: int, rng: random.Random, max_distance: int = 9) -> FLInstance:
    return FLInstance(tuple(tuple(rng.randint(0, max_distance) for _ in range(m)) for _ in range(n)), k)
