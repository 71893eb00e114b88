"""k-Median facility location in 2^n poly(m, n) time via min-sum subset convolution.

``cost_1(Y)`` is the best single-facility cost of client set ``Y`` and
``cost_i = cost_{i-1} (+) cost_1`` where ``(f (+) g)(Y)`` is the minimum of
``f(A) + g(B)`` over disjoint splits ``A | B = Y``.  ``cost_1(empty) = 0``,
so ``cost_i`` is the optimum with *at most* ``i`` clusters.

The fast convolution embeds each value ``f(A)`` as the monomial ``x^f(A)``
and computes the ordinary ranked subset convolution of the resulting
polynomials; the answer for ``Y`` is the smallest exponent with a nonzero
coefficient.  Polynomials are handled in evaluation form at the roots of
unity of an NTT-friendly prime, so the ranked products are pointwise and
only one inverse transform per subset is needed.  Coefficients count
splits and therefore never exceed ``2^n``, which is below the prime, so
the modular arithmetic is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .metric import CapacityError, Objective

__all__ = [
    "INF",
    "FL_MAX_CLIENTS",
    "NAIVE_MAX_CLIENTS",
    "BRUTE_FORCE_MAX_SUBSETS",
    "InfeasibleError",
    "FLInstance",
    "FLClustering",
    "FLResult",
    "compute_cost1",
    "min_sum_convolve",
    "naive_min_sum_convolve",
    "cost_tables",
    "solve_fl",
    "brute_force_fl",
    "fl_cost",
]

INF = 2**61
FINITE_LIMIT = 2**60
FL_MAX_CLIENTS = 24
NAIVE_MAX_CLIENTS = 16
BRUTE_FORCE_MAX_SUBSETS = 10**7

# 27 * 2^20 + 1, primitive root 5.  It exceeds 2^24 (the largest possible
# split count) and p^2 * 25 < 2^63, so a rank's sum of products needs no
# intermediate reduction.
_P = 28311553
_G = 5
_MAX_NTT = 1 << 20


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class FLInstance:
    """Clients ``0..n-1``, facilities ``0..m-1``, budget ``k``.

    ``dist[p][c]`` is the (already z-powered) cost of serving client ``p``
    from facility ``c``; ``INF`` marks an unusable pair.
    """

    dist: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self) -> None:
        dist = tuple(tuple(int(x) for x in row) for row in self.dist)
        object.__setattr__(self, "dist", dist)
        if not dist:
            raise ValueError("instance needs at least one client")
        m = len(dist[0])
        if m == 0:
            raise ValueError("instance needs at least one facility")
        for i, row in enumerate(dist):
            if len(row) != m:
                raise ValueError(f"row {i} has length {len(row)}, expected {m}")
            for j, d in enumerate(row):
                if d < 0:
                    raise ValueError(f"negative distance at ({i},{j})")
                if FINITE_LIMIT < d < INF or d > INF:
                    raise ValueError(f"distance at ({i},{j}) out of range")
        if self.k < 0:
            raise ValueError("budget k must be nonnegative")
        if len(dist) * self.max_distance() > FINITE_LIMIT:
            raise OverflowError("n * D exceeds the finite value range")

    @classmethod
    def from_distances(cls, dist: Sequence[Sequence[int]], k: int, obj: Objective = Objective.median()) -> "FLInstance":
        """Raise every finite distance to the objective's power on ingestion."""
        if not obj.is_sum:
            raise ValueError("facility solver handles sum objectives only")
        return cls(tuple(tuple(d if d >= INF else obj.apply(int(d)) for d in row) for row in dist), k)

    @property
    def n(self) -> int:
        return len(self.dist)

    @property
    def m(self) -> int:
        return len(self.dist[0])

    def max_distance(self) -> int:
        return max((d for row in self.dist for d in row if d < INF), default=0)


@dataclass(frozen=True)
class FLClustering:
    """Open facilities and, per client, an index into ``facilities``."""

    facilities: tuple[int, ...]
    assignment: tuple[int, ...]

    def clusters(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in self.facilities]
        for p, c in enumerate(self.assignment):
            groups[c].append(p)
        return groups


@dataclass
class FLResult:
    clustering: FLClustering
    cost: int
    stats: dict = field(default_factory=dict)


def fl_cost(inst: FLInstance, cl: FLClustering) -> int:
    if len(cl.assignment) != inst.n:
        raise ValueError("assignment does not cover every client")
    if len(cl.facilities) > inst.k:
        raise ValueError("more open facilities than the budget")
    total = sum(inst.dist[p][cl.facilities[c]] for p, c in enumerate(cl.assignment))
    return min(total, INF)


def _check_clients(n: int, cap: int) -> None:
    if n > cap:
        raise CapacityError(f"at most {cap} clients supported, got {n}")


def _subset_sums(column: np.ndarray) -> np.ndarray:
    """``out[mask] = sum(column[p] for p in mask)`` for all masks."""
    out = np.zeros(1, dtype=np.int64)
    for d in column:
        out = np.concatenate([out, out + d])
    return out


def compute_cost1(inst: FLInstance, with_argmin: bool = False):
    """Best single-facility cost for every client subset (lowest facility on ties)."""
    _check_clients(inst.n, FL_MAX_CLIENTS)
    table = np.array(inst.dist, dtype=np.int64)
    best = np.full(1 << inst.n, INF, dtype=np.int64)
    arg = np.zeros(1 << inst.n, dtype=np.int64)
    for c in range(inst.m):
        col = table[:, c]
        if np.all(col >= INF):
            continue
        finite = col < INF
        sums = _subset_sums(np.where(finite, col, 0))
        bad = _subset_sums(np.where(finite, 0, 1))
        sums[bad > 0] = INF
        better = sums < best
        best[better] = sums[better]
        arg[better] = c
    best[0] = 0
    return (best, arg) if with_argmin else best


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        pc[1 << b: 1 << (b + 1)] = pc[: 1 << b] + 1
    return pc


def _zeta(a: np.ndarray, n: int, sign: int) -> None:
    """In-place subset-sum (sign=+1) or Moebius (sign=-1) transform on axis 1.

    Entries must start in ``[0, _P)``; magnitudes grow to at most
    ``2^n * _P < 2^50``, so reduction happens once at the end.
    """
    lead = a.shape[0]
    tail = a.shape[2:]
    for b in range(n):
        v = a.reshape((lead, 1 << (n - b - 1), 2, 1 << b) + tail)
        if sign > 0:
            v[:, :, 1] += v[:, :, 0]
        else:
            v[:, :, 1] -= v[:, :, 0]
    a %= _P


def _inverse_ntt(a: np.ndarray) -> np.ndarray:
    """Inverse NTT along the last axis (length a power of two), mod _P."""
    size = a.shape[-1]
    bits = size.bit_length() - 1
    rev = np.zeros(size, dtype=np.int64)
    for i in range(size):
        rev[i] = int(format(i, f"0{bits}b")[::-1], 2) if bits else 0
    a = a[..., rev] % _P
    root_inv = pow(pow(_G, (_P - 1) // size, _P), _P - 2, _P)
    h = 1
    while h < size:
        w_len = pow(root_inv, size // (2 * h), _P)
        tw = np.array([pow(w_len, j, _P) for j in range(h)], dtype=np.int64)
        v = a.reshape(a.shape[:-1] + (size // (2 * h), 2, h))
        u = v[..., 0, :].copy()
        t = v[..., 1, :] * tw % _P
        v[..., 0, :] = (u + t) % _P
        v[..., 1, :] = (u - t) % _P
        a = v.reshape(a.shape)
        h *= 2
    return a * pow(size, _P - 2, _P) % _P


def _as_function(f) -> np.ndarray:
    f = np.asarray(f, dtype=np.int64)
    size = f.shape[0]
    if f.ndim != 1 or size & (size - 1):
        raise ValueError("subset function length must be a power of two")
    if np.any(f < 0):
        raise ValueError("subset function values must be nonnegative")
    return np.where(f >= INF, INF, f)


def min_sum_convolve(f, g, block: int | None = None) -> np.ndarray:
    """Min-sum subset convolution via ranked transforms on embedded values.

    Evaluation points are processed ``block`` at a time; by default the
    block is sized to keep each ranked work array near 2^24 entries.
    """
    f, g = _as_function(f), _as_function(g)
    if f.shape != g.shape:
        raise ValueError("functions must be over the same ground set")
    size = f.shape[0]
    n = size.bit_length() - 1
    _check_clients(n, FL_MAX_CLIENTS)
    ff, gf = f < INF, g < INF
    if not ff.any() or not gf.any():
        return np.full(size, INF, dtype=np.int64)
    fmax, gmax = int(f[ff].max()), int(g[gf].max())
    length = 1 << (fmax + gmax).bit_length()
    if length > _MAX_NTT:
        raise OverflowError(f"values up to {fmax + gmax} are too large to embed")

    if block is None:
        block = max(1, min(64, (1 << 24) // ((n + 1) * size)))
    pc = _popcounts(n)
    root = pow(_G, (_P - 1) // length, _P)
    evals = np.zeros((size, length), dtype=np.int64)

    table = np.ones(length, dtype=np.int64)
    for e in range(1, length):
        table[e] = table[e - 1] * root % _P

    def powers(values: np.ndarray, js: np.ndarray) -> np.ndarray:
        # root^(v*j) for each value v (rows) and evaluation index j (cols)
        return table[np.outer(values, js) % length]

    for start in range(0, length, block):
        js = np.arange(start, min(start + block, length), dtype=np.int64)
        fr = np.zeros((n + 1, size, len(js)), dtype=np.int64)
        gr = np.zeros((n + 1, size, len(js)), dtype=np.int64)
        fpow = powers(np.where(ff, f, 0), js)
        gpow = powers(np.where(gf, g, 0), js)
        for r in range(n + 1):
            sel = (pc == r) & ff
            fr[r, sel] = fpow[sel]
            sel = (pc == r) & gf
            gr[r, sel] = gpow[sel]
        _zeta(fr, n, +1)
        _zeta(gr, n, +1)
        prod = np.empty_like(fr)
        for r in range(n + 1):
            acc = fr[0] * gr[r]
            for i in range(1, r + 1):
                acc += fr[i] * gr[r - i]
            prod[r] = acc % _P
        _zeta(prod, n, -1)
        evals[:, start:start + len(js)] = prod[pc, np.arange(size)]
    coeffs = _inverse_ntt(evals)
    nonzero = coeffs != 0
    has = nonzero.any(axis=1)
    out = np.full(size, INF, dtype=np.int64)
    out[has] = nonzero[has].argmax(axis=1)
    return out


def _submasks_table(n: int, c: int) -> np.ndarray:
    """All submasks of ``c`` as an array."""
    bits = [b for b in range(n) if c >> b & 1]
    t = np.arange(1 << len(bits), dtype=np.int64)
    out = np.zeros_like(t)
    for i, b in enumerate(bits):
        out |= ((t >> i) & 1) << b
    return out


def naive_min_sum_convolve(f, g) -> np.ndarray:
    """Direct O(3^n) evaluation of the min over disjoint splits."""
    f, g = _as_function(f), _as_function(g)
    if f.shape != g.shape:
        raise ValueError("functions must be over the same ground set")
    size = f.shape[0]
    n = size.bit_length() - 1
    _check_clients(n, NAIVE_MAX_CLIENTS)
    out = np.full(size, INF, dtype=np.int64)
    full = size - 1
    for a in range(size):
        if f[a] >= INF:
            continue
        bs = _submasks_table(n, full ^ a)
        vals = np.minimum(f[a] + g[bs], INF)
        np.minimum.at(out, a | bs, vals)
    return out


def cost_tables(inst: FLInstance, convolve: Callable = min_sum_convolve) -> list[np.ndarray]:
    """``[cost_1, ..., cost_k]``; each level is one convolution with ``cost_1``."""
    if inst.k < 1:
        raise ValueError("budget k must be at least 1")
    cost1 = compute_cost1(inst)
    levels = [cost1]
    for _ in range(1, inst.k):
        levels.append(np.asarray(convolve(levels[-1], cost1), dtype=np.int64))
    return levels


def solve_fl(inst: FLInstance, convolve: Callable = min_sum_convolve) -> FLResult:
    """Optimal facility-location clustering with at most ``k`` facilities.

    The witness is recovered top-down: at level ``i`` the sub-masks ``B`` of
    the current client set are scanned in decreasing order and the first
    split reproducing ``cost_i`` is taken.
    """
    if inst.k < 1:
        raise ValueError("budget k must be at least 1")
    _check_clients(inst.n, FL_MAX_CLIENTS)
    # Budget above min(m, n) never helps; it only adds convolutions.
    levels = cost_tables(FLInstance(inst.dist, min(inst.k, inst.m, inst.n)), convolve)
    cost1, arg1 = compute_cost1(inst, with_argmin=True)
    full = (1 << inst.n) - 1
    opt = int(levels[-1][full])
    if opt >= INF:
        raise InfeasibleError("some client cannot be served by any facility")

    groups: list[tuple[int, int]] = []  # (facility, client mask)
    y = full
    for i in range(len(levels) - 1, 0, -1):
        target = levels[i][y]
        prev = levels[i - 1]
        b = y
        while True:
            if prev[y ^ b] < INF and cost1[b] < INF and prev[y ^ b] + cost1[b] == target:
                break
            if b == 0:
                raise RuntimeError("backtracking found no split; cost table is inconsistent")
            b = (b - 1) & y
        if b:
            groups.append((int(arg1[b]), b))
        y ^= b
    if y:
        groups.append((int(arg1[y]), y))

    by_facility: dict[int, int] = {}
    for c, mask in groups:
        by_facility[c] = by_facility.get(c, 0) | mask
    facilities = tuple(sorted(by_facility))
    assignment = [0] * inst.n
    for idx, c in enumerate(facilities):
        for p in range(inst.n):
            if by_facility[c] >> p & 1:
                assignment[p] = idx
    cl = FLClustering(facilities, tuple(assignment))
    cost = fl_cost(inst, cl)
    if cost != opt:
        raise RuntimeError(f"witness cost {cost} != table optimum {opt}")
    return FLResult(cl, cost, {"levels": len(levels), "convolutions": len(levels) - 1})


def brute_force_fl(inst: FLInstance) -> tuple[FLClustering, int]:
    """Enumerate facility sets of size <= k with nearest-facility assignment."""
    if inst.k < 1:
        raise ValueError("budget k must be at least 1")
    kk = min(inst.k, inst.m)
    total = sum(math.comb(inst.m, r) for r in range(1, kk + 1))
    if total > BRUTE_FORCE_MAX_SUBSETS:
        raise CapacityError(f"{total} facility subsets exceed the brute-force cap")
    d = inst.dist
    best_cost, best_set = None, None
    for r in range(1, kk + 1):
        for fs in itertools.combinations(range(inst.m), r):
            cost = min(sum(min(d[p][c] for c in fs) for p in range(inst.n)), INF)
            if best_cost is None or cost < best_cost:
                best_cost, best_set = cost, fs
    if best_cost >= INF:
        raise InfeasibleError("some client cannot be served by any facility")
    picks = [min(best_set, key=lambda c: (d[p][c], c)) for p in range(inst.n)]
    used = tuple(sorted(set(picks)))
    cl = FLClustering(used, tuple(used.index(c) for c in picks))
    return cl, best_cost
