"""Distance tables, objectives, clusterings and cost evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "MAX_POINTS",
    "MAX_DISTANCE",
    "COST_LIMIT",
    "InstanceError",
    "CapacityError",
    "ClusteringError",
    "MetricInstance",
    "Objective",
    "Clustering",
    "effective_distance",
    "evaluate_cost",
    "nearest_assignment",
    "validate_instance",
]

MAX_POINTS = 63
MAX_DISTANCE = 2**40
COST_LIMIT = 2**63 - 1


class InstanceError(ValueError):
    """A distance table violates the instance invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class ClusteringError(ValueError):
    pass


class CapacityError(ValueError):
    """Input is beyond the size a brute-force or table-based routine handles."""


def validate_instance(dist: Sequence[Sequence[int]], symmetric_required: bool = True) -> list[str]:
    """Return every violated invariant of a square distance table (empty if ok)."""
    out: list[str] = []
    n = len(dist)
    if not 1 <= n <= MAX_POINTS:
        out.append(f"point count {n} outside 1..{MAX_POINTS}")
    for i, row in enumerate(dist):
        if len(row) != n:
            out.append(f"row {i} has length {len(row)}, expected {n}")
            continue
        for j, d in enumerate(row):
            if isinstance(d, bool) or not isinstance(d, int):
                out.append(f"non-integer entry at ({i},{j})")
            elif d < 0:
                out.append(f"negative entry at ({i},{j})")
            elif d > MAX_DISTANCE:
                out.append(f"entry at ({i},{j}) exceeds 2^40")
        if i < len(row) and row[i] != 0:
            out.append(f"nonzero diagonal at {i}")
    if symmetric_required and not out:
        for i in range(n):
            for j in range(i + 1, n):
                if dist[i][j] != dist[j][i]:
                    out.append(f"asymmetry at ({i},{j})")
    return out


@dataclass(frozen=True)
class MetricInstance:
    """An n-point distance space.  Triangle inequality is not assumed.

    With ``symmetric=False`` the table is read directionally:
    ``dist[point][center]`` is what ``point`` pays when served by ``center``.
    """

    dist: tuple[tuple[int, ...], ...]
    symmetric: bool = True

    def __post_init__(self) -> None:
        dist = tuple(tuple(row) for row in self.dist)
        object.__setattr__(self, "dist", dist)
        problems = validate_instance(dist, self.symmetric)
        if problems:
            raise InstanceError(problems)

    @classmethod
    def from_matrix(cls, dist, symmetric: bool = True) -> "MetricInstance":
        return cls(tuple(tuple(int(x) for x in row) for row in dist), symmetric)

    @property
    def n(self) -> int:
        return len(self.dist)

    def max_distance(self) -> int:
        return max(max(row) for row in self.dist)


@dataclass(frozen=True)
class Objective:
    """Clustering objective: sum of z-th powers (median z=1, means z=2) or max."""

    kind: str = "median"
    z: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("median", "means", "power", "center"):
            raise ValueError(f"unknown objective {self.kind!r}")
        z = {"median": 1, "means": 2, "center": 1}.get(self.kind, self.z)
        if z < 1:
            raise ValueError("power objective requires z >= 1")
        object.__setattr__(self, "z", z)

    @classmethod
    def median(cls) -> "Objective":
        return cls("median")

    @classmethod
    def means(cls) -> "Objective":
        return cls("means")

    @classmethod
    def power(cls, z: int) -> "Objective":
        return cls("power", z)

    @classmethod
    def center(cls) -> "Objective":
        return cls("center")

    @classmethod
    def parse(cls, text: str) -> "Objective":
        """Parse ``median``, ``means``, ``center`` or ``power:Z``."""
        text = text.strip().lower()
        if text.startswith("power"):
            _, _, z = text.partition(":")
            if not z.isdigit():
                raise ValueError(f"bad power objective {text!r}; use power:Z")
            return cls.power(int(z))
        return cls(text)

    @property
    def is_sum(self) -> bool:
        return self.kind != "center"

    @property
    def name(self) -> str:
        return f"power:{self.z}" if self.kind == "power" else self.kind

    def apply(self, d: int) -> int:
        if not self.is_sum or self.z == 1:
            return d
        v = d**self.z
        if v > COST_LIMIT:
            raise OverflowError(f"{d}^{self.z} does not fit in 64 bits")
        return v


def effective_distance(inst: MetricInstance, i: int, j: int, obj: Objective) -> int:
    """Cost point ``i`` pays when served by center ``j``."""
    return obj.apply(inst.dist[i][j])


@dataclass(frozen=True)
class Clustering:
    """Centers plus, for every point, the index (into ``centers``) of its cluster."""

    centers: tuple[int, ...]
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "centers", tuple(self.centers))
        object.__setattr__(self, "assignment", tuple(self.assignment))

    @property
    def k(self) -> int:
        return len(self.centers)

    def clusters(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in self.centers]
        for p, c in enumerate(self.assignment):
            groups[c].append(p)
        return groups

    @classmethod
    def from_clusters(cls, n: int, centers: Sequence[int], members: Sequence[Sequence[int]]) -> "Clustering":
        """Build from explicit member lists, ordering clusters by center index."""
        order = sorted(range(len(centers)), key=lambda i: centers[i])
        assignment = [-1] * n
        for rank, i in enumerate(order):
            for p in members[i]:
                if assignment[p] != -1:
                    raise ClusteringError(f"point {p} appears in two clusters")
                assignment[p] = rank
        return cls(tuple(centers[i] for i in order), tuple(assignment))

    def validate(self, n: int) -> None:
        if len(self.assignment) != n:
            raise ClusteringError(f"assignment covers {len(self.assignment)} points, expected {n}")
        if len(set(self.centers)) != len(self.centers):
            raise ClusteringError("centers are not pairwise distinct")
        sizes = [0] * len(self.centers)
        for p, c in enumerate(self.assignment):
            if not 0 <= c < len(self.centers):
                raise ClusteringError(f"point {p} assigned to unknown cluster {c}")
            sizes[c] += 1
        for i, c in enumerate(self.centers):
            if not 0 <= c < n:
                raise ClusteringError(f"center {c} out of range")
            if self.assignment[c] != i:
                raise ClusteringError(f"center {c} is not inside its own cluster")
        if any(s == 0 for s in sizes):
            raise ClusteringError("empty cluster")


def evaluate_cost(inst: MetricInstance, cl: Clustering, obj: Objective) -> int:
    """Sum (or max, for the center objective) of point-to-center costs."""
    cl.validate(inst.n)
    costs = (effective_distance(inst, p, cl.centers[c], obj) for p, c in enumerate(cl.assignment))
    if not obj.is_sum:
        return max(costs)
    total = sum(costs)
    if total > COST_LIMIT:
        raise OverflowError("clustering cost does not fit in 64 bits")
    return total


def nearest_assignment(inst: MetricInstance, centers: Sequence[int], obj: Objective) -> Clustering:
    """Assign every point to its cheapest center (ties to the lowest center index).

    Centers always serve themselves, even if another center is at distance 0.
    """
    if not centers:
        raise ValueError("center list is empty")
    cs = sorted(centers)
    if len(set(cs)) != len(cs):
        raise ValueError("centers must be distinct")
    rank = {c: i for i, c in enumerate(cs)}
    assignment = []
    for p in range(inst.n):
        if p in rank:
            assignment.append(rank[p])
            continue
        row = inst.dist[p]
        best = min(range(len(cs)), key=lambda i: (row[cs[i]], i))
        assignment.append(best)
    return Clustering(tuple(cs), tuple(assignment))
