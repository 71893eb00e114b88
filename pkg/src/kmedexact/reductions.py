"""Hardness reductions used as instance generators, plus their iff checks.

* Dominating Set -> k-Median: shortest-path metric of the graph; a
  dominating set of size <= k exists iff the optimal k-Median cost is n - k.
* Set Cover -> k-Median facility location: clients are elements, facilities
  are sets, distances are shortest paths in the incidence graph; a cover of
  size <= k exists iff the optimal cost with budget k is n.
* Threshold graph: links k-Center to Dominating Set.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .exact import brute_force_solve
from .facility import FLInstance, brute_force_fl
from .metric import CapacityError, MetricInstance, Objective, validate_instance

__all__ = [
    "SimpleGraph",
    "SetSystem",
    "ReductionError",
    "PropertyReport",
    "domset_to_kmedian",
    "check_domset_property",
    "setcover_to_fl",
    "check_setcover_property",
    "threshold_graph",
    "brute_force_dominating_set",
    "brute_force_set_cover",
    "kcenter_by_threshold",
]

DOMSET_ORACLE_MAX = 20
DOMSET_CHECK_MAX = 9
SETCOVER_CHECK_MAX_ELEMENTS = 12
SETCOVER_CHECK_MAX_SETS = 8


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return [sorted(a) for a in adj]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)


@dataclass(frozen=True)
class SetSystem:
    n: int
    sets: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self) -> None:
        norm = []
        for i, s in enumerate(self.sets):
            s = tuple(sorted(set(int(x) for x in s)))
            if not s:
                raise ValueError(f"set {i} is empty")
            if s[0] < 0 or s[-1] >= self.n:
                raise ValueError(f"set {i} has an element outside the universe")
            norm.append(s)
        object.__setattr__(self, "sets", tuple(norm))
        if self.k < 0:
            raise ValueError("budget must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.sets)


@dataclass
class PropertyReport:
    ok: bool
    details: dict = field(default_factory=dict)


def _bfs(adj: list[list[int]], src: int) -> list[Optional[int]]:
    dist: list[Optional[int]] = [None] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] is None:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def domset_to_kmedian(g: SimpleGraph) -> MetricInstance:
    """Unit-weight shortest-path metric of a connected graph."""
    adj = g.adjacency()
    rows = []
    for u in range(g.n):
        d = _bfs(adj, u)
        if any(x is None for x in d):
            raise ReductionError("graph is disconnected; shortest-path metric is not finite")
        rows.append(tuple(d))
    return MetricInstance(tuple(rows))


def brute_force_dominating_set(g: SimpleGraph) -> tuple[int, tuple[int, ...]]:
    """Domination number and a lexicographically first minimum witness."""
    if g.n > DOMSET_ORACLE_MAX:
        raise CapacityError(f"oracle supports at most {DOMSET_ORACLE_MAX} vertices")
    if g.n == 0:
        return 0, ()
    closed = [1 << u for u in range(g.n)]
    for u, v in g.edges:
        closed[u] |= 1 << v
        closed[v] |= 1 << u
    full = (1 << g.n) - 1
    for size in range(1, g.n + 1):
        for cand in itertools.combinations(range(g.n), size):
            covered = 0
            for u in cand:
                covered |= closed[u]
            if covered == full:
                return size, cand
    raise AssertionError("the full vertex set always dominates")


def check_domset_property(g: SimpleGraph, k: int) -> PropertyReport:
    """Optimal k-Median cost of the reduction equals n-k iff gamma(g) <= k."""
    if g.n > DOMSET_CHECK_MAX:
        raise CapacityError(f"check supports at most {DOMSET_CHECK_MAX} vertices")
    if not 1 <= k <= g.n:
        raise ValueError("need 1 <= k <= n")
    inst = domset_to_kmedian(g)
    _, cost = brute_force_solve(inst, k, Objective.median())
    gamma, witness = brute_force_dominating_set(g)
    lower = cost >= g.n - k
    iff = (cost == g.n - k) == (gamma <= k)
    metric_ok = not validate_instance(inst.dist) and _triangle_ok(inst)
    return PropertyReport(
        lower and iff and metric_ok,
        {"cost": cost, "n_minus_k": g.n - k, "gamma": gamma, "witness": witness,
         "lower_bound": lower, "iff": iff, "metric": metric_ok},
    )


def _triangle_ok(inst: MetricInstance) -> bool:
    d = inst.dist
    r = range(inst.n)
    return all(d[i][j] <= d[i][t] + d[t][j] for i in r for j in r for t in r)


def setcover_to_fl(s: SetSystem) -> FLInstance:
    """Client-to-facility shortest paths in the element/set incidence graph.

    If every element is covered but the incidence graph falls apart into
    several components, one facility of each component is joined to a
    shared hub vertex so all distances are finite.  The hub sits on the
    client side of the bipartition, so non-incident pairs stay at odd
    distance >= 3 and the iff property is unaffected.
    """
    n, m = s.n, s.m
    # vertices: clients 0..n-1, facilities n..n+m-1, optional hub n+m
    adj: list[list[int]] = [[] for _ in range(n + m + 1)]
    for j, members in enumerate(s.sets):
        for i in members:
            adj[i].append(n + j)
            adj[n + j].append(i)
    for i in range(n):
        if not adj[i]:
            raise ReductionError(f"element {i} belongs to no set")
    seen = [False] * (n + m)
    reps = []
    for j in range(m):
        if seen[n + j]:
            continue
        reps.append(n + j)
        for v, d in enumerate(_bfs(adj[: n + m], n + j)):
            if d is not None:
                seen[v] = True
    if len(reps) > 1:
        hub = n + m
        for r in reps:
            adj[hub].append(r)
            adj[r].append(hub)
    rows = []
    for i in range(n):
        d = _bfs(adj, i)
        rows.append(tuple(d[n + j] for j in range(m)))
    return FLInstance(tuple(rows), s.k)


def brute_force_set_cover(s: SetSystem) -> Optional[tuple[int, ...]]:
    """A minimum set cover (indices), or None if the sets do not cover."""
    full = (1 << s.n) - 1
    masks = [sum(1 << x for x in st) for st in s.sets]
    for size in range(0, s.m + 1):
        for cand in itertools.combinations(range(s.m), size):
            cov = 0
            for j in cand:
                cov |= masks[j]
            if cov == full:
                return cand
    return None


def check_setcover_property(s: SetSystem) -> PropertyReport:
    """Optimal facility cost with budget k equals n iff a cover of size <= k exists."""
    if s.n > SETCOVER_CHECK_MAX_ELEMENTS or s.m > SETCOVER_CHECK_MAX_SETS:
        raise CapacityError("set system too large for the brute-force check")
    if s.k < 1:
        raise ValueError("budget must be at least 1")
    inst = setcover_to_fl(s)
    _, cost = brute_force_fl(inst)
    cover = brute_force_set_cover(s)
    has_cover = cover is not None and len(cover) <= s.k
    lower = cost >= s.n
    iff = (cost == s.n) == has_cover
    return PropertyReport(lower and iff, {"cost": cost, "n": s.n, "min_cover": cover,
                                          "lower_bound": lower, "iff": iff})


def threshold_graph(inst: MetricInstance, r: int) -> SimpleGraph:
    """Edge (u, v) iff u != v and ``dist[u][v] <= r`` (symmetric tables only)."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if not inst.symmetric:
        raise ValueError("threshold graphs need a symmetric distance table")
    d = inst.dist
    edges = [(u, v) for u in range(inst.n) for v in range(u + 1, inst.n) if d[u][v] <= r]
    return SimpleGraph(inst.n, tuple(edges))


def kcenter_by_threshold(inst: MetricInstance, k: int) -> int:
    """Smallest distance r whose threshold graph has a dominating set of size <= k."""
    for r in sorted({x for row in inst.dist for x in row}):
        gamma, _ = brute_force_dominating_set(threshold_graph(inst, r))
        if gamma <= k:
            return r
    raise AssertionError("the largest distance always yields a complete graph")
