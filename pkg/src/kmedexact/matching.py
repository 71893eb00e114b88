"""Minimum-weight perfect matching on general graphs.

The production path is an O(v^3) primal-dual blossom algorithm (Edmonds,
with Galil's bookkeeping for blossom best-edges).  It is run as a
maximum-cardinality maximum-weight matching on the complemented weights
``2 * (wmax - w)``, which turns "maximum weight among the largest matchings"
into "minimum weight among perfect matchings" whenever a perfect matching
exists.  Weights are doubled so every dual variable stays integral.

``brute_force_perfect_matching`` is an independent bitmask DP used as a
test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .metric import CapacityError

__all__ = [
    "WeightedGraph",
    "Matching",
    "min_weight_perfect_matching",
    "brute_force_perfect_matching",
    "CapacityError",
]

ORACLE_MAX_VERTICES = 20


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on vertices ``0..v-1`` with nonnegative integer weights.

    Edges are stored as ``(u, w, weight)`` with ``u < w``.
    """

    v: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.v < 0:
            raise ValueError("vertex count must be nonnegative")
        edges = tuple((int(a), int(b), int(wt)) for a, b, wt in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for a, b, wt in edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not 0 <= a < b < self.v:
                raise ValueError(f"edge ({a}, {b}) not in canonical order or out of range")
            if wt < 0:
                raise ValueError(f"negative weight on edge ({a}, {b})")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))

    @classmethod
    def from_edges(cls, v: int, edges: Iterable[tuple[int, int, int]]) -> "WeightedGraph":
        """Build a graph, normalising each edge to ``u < w``."""
        norm = []
        for a, b, wt in edges:
            if a > b:
                a, b = b, a
            norm.append((a, b, wt))
        return cls(v, tuple(norm))


@dataclass(frozen=True)
class Matching:
    """A set of pairwise vertex-disjoint edges, as indices into ``graph.edges``."""

    edges: tuple[int, ...]
    weight: int = field(default=0)

    def pairs(self, g: WeightedGraph) -> list[tuple[int, int]]:
        return [(g.edges[e][0], g.edges[e][1]) for e in self.edges]

    def is_perfect(self, g: WeightedGraph) -> bool:
        covered = set()
        for e in self.edges:
            a, b, _ = g.edges[e]
            if a in covered or b in covered:
                return False
            covered.update((a, b))
        return len(covered) == g.v


def _finish(g: WeightedGraph, edge_ids: Iterable[int]) -> Matching:
    ids = tuple(sorted(edge_ids))
    return Matching(ids, sum(g.edges[e][2] for e in ids))


def min_weight_perfect_matching(g: WeightedGraph) -> Optional[Matching]:
    """Return a minimum-weight perfect matching of ``g`` or ``None`` if none exists.

    The result is deterministic: vertices are scanned in ascending index
    order and, among equal-slack choices, the first edge encountered in
    ``g.edges`` order wins.  Matched edges are reported in ascending
    edge-index order.
    """
    if g.v % 2:
        return None
    if g.v == 0:
        return Matching((), 0)
    if len(g.edges) < g.v // 2:
        return None
    wmax = max(wt for _, _, wt in g.edges)
    # Complemented, doubled weights keep duals integral.
    edges = [(a, b, 2 * (wmax - wt)) for a, b, wt in g.edges]
    mate = _BlossomMatcher(g.v, edges).run()
    if any(m == -1 for m in mate):
        return None
    index = {(a, b): i for i, (a, b, _) in enumerate(g.edges)}
    chosen = [index[(a, mate[a])] for a in range(g.v) if a < mate[a]]
    return _finish(g, chosen)


class _BlossomMatcher:
    """Maximum-cardinality maximum-weight matching, O(v^3).

    Edge ``k`` has endpoints ``2k`` (its first vertex) and ``2k+1`` (its
    second vertex); ``endpoint[p]`` is the vertex at endpoint ``p`` and
    ``p ^ 1`` is the opposite endpoint.  Blossoms are numbered ``v..2v-1``.
    Labels: 0 free, 1 outer (S), 2 inner (T); bit 4 marks the scan in
    ``_scan_blossom``.
    """

    def __init__(self, nvertex: int, edges: list[tuple[int, int, int]]):
        self.nvertex = nvertex
        self.edges = edges
        n2 = 2 * nvertex
        wmax = max((wt for _, _, wt in edges), default=0)
        self.endpoint = [edges[p >> 1][p & 1] for p in range(2 * len(edges))]
        self.neighbend: list[list[int]] = [[] for _ in range(nvertex)]
        for k, (i, j, _) in enumerate(edges):
            self.neighbend[i].append(2 * k + 1)
            self.neighbend[j].append(2 * k)
        self.mate = [-1] * nvertex
        self.label = [0] * n2
        self.labelend = [-1] * n2
        self.inblossom = list(range(nvertex))
        self.blossomparent = [-1] * n2
        self.blossomchilds: list[Optional[list[int]]] = [None] * n2
        self.blossombase = list(range(nvertex)) + [-1] * nvertex
        self.blossomendps: list[Optional[list[int]]] = [None] * n2
        self.bestedge = [-1] * n2
        self.blossombestedges: list[Optional[list[int]]] = [None] * n2
        self.unusedblossoms = list(range(nvertex, n2))
        self.dualvar = [wmax] * nvertex + [0] * nvertex
        self.allowedge = [False] * len(edges)
        self.queue: list[int] = []

    def slack(self, k: int) -> int:
        i, j, wt = self.edges[k]
        return self.dualvar[i] + self.dualvar[j] - 2 * wt

    def leaves(self, b: int) -> list[int]:
        if b < self.nvertex:
            return [b]
        out: list[int] = []
        stack = [b]
        while stack:
            t = stack.pop()
            if t < self.nvertex:
                out.append(t)
            else:
                stack.extend(reversed(self.blossomchilds[t]))
        return out

    def assign_label(self, w: int, t: int, p: int) -> None:
        while True:
            b = self.inblossom[w]
            self.label[w] = self.label[b] = t
            self.labelend[w] = self.labelend[b] = p
            self.bestedge[w] = self.bestedge[b] = -1
            if t == 1:
                self.queue.extend(self.leaves(b))
                return
            # Inner blossom: its base's mate becomes outer.
            base = self.blossombase[b]
            mp = self.mate[base]
            w, t, p = self.endpoint[mp], 1, mp ^ 1

    def _scan_blossom(self, v: int, w: int) -> int:
        """Trace back from ``v`` and ``w``; return the new blossom base or -1."""
        path = []
        base = -1
        label, labelend, endpoint, inblossom = self.label, self.labelend, self.endpoint, self.inblossom
        while v != -1 or w != -1:
            b = inblossom[v]
            if label[b] & 4:
                base = self.blossombase[b]
                break
            path.append(b)
            label[b] = 5
            if labelend[b] == -1:
                v = -1
            else:
                v = endpoint[labelend[b]]
                b = inblossom[v]
                v = endpoint[labelend[b]]
            if w != -1:
                v, w = w, v
        for b in path:
            label[b] = 1
        return base

    def _add_blossom(self, base: int, k: int) -> None:
        v, w, _ = self.edges[k]
        inblossom, labelend, endpoint = self.inblossom, self.labelend, self.endpoint
        bb = inblossom[base]
        bv = inblossom[v]
        bw = inblossom[w]
        b = self.unusedblossoms.pop()
        self.blossombase[b] = base
        self.blossomparent[b] = -1
        self.blossomparent[bb] = b
        path: list[int] = []
        endps: list[int] = []
        while bv != bb:
            self.blossomparent[bv] = b
            path.append(bv)
            endps.append(labelend[bv])
            v = endpoint[labelend[bv]]
            bv = inblossom[v]
        path.append(bb)
        path.reverse()
        endps.reverse()
        endps.append(2 * k)
        while bw != bb:
            self.blossomparent[bw] = b
            path.append(bw)
            endps.append(labelend[bw] ^ 1)
            w = endpoint[labelend[bw]]
            bw = inblossom[w]
        self.blossomchilds[b] = path
        self.blossomendps[b] = endps
        self.label[b] = 1
        labelend[b] = labelend[bb]
        self.dualvar[b] = 0
        for leaf in self.leaves(b):
            if self.label[inblossom[leaf]] == 2:
                self.queue.append(leaf)
            inblossom[leaf] = b
        # Best edge from the new blossom to each neighbouring outer blossom.
        bestedgeto = [-1] * (2 * self.nvertex)
        for sub in path:
            if self.blossombestedges[sub] is None:
                nblists = [[p >> 1 for p in self.neighbend[leaf]] for leaf in self.leaves(sub)]
            else:
                nblists = [self.blossombestedges[sub]]
            for nblist in nblists:
                for kk in nblist:
                    i, j, _ = self.edges[kk]
                    if inblossom[j] == b:
                        i, j = j, i
                    bj = inblossom[j]
                    if (bj != b and self.label[bj] == 1
                            and (bestedgeto[bj] == -1 or self.slack(kk) < self.slack(bestedgeto[bj]))):
                        bestedgeto[bj] = kk
            self.blossombestedges[sub] = None
            self.bestedge[sub] = -1
        best = [kk for kk in bestedgeto if kk != -1]
        self.blossombestedges[b] = best
        self.bestedge[b] = -1
        for kk in best:
            if self.bestedge[b] == -1 or self.slack(kk) < self.slack(self.bestedge[b]):
                self.bestedge[b] = kk

    def _expand_blossom(self, b: int, endstage: bool) -> None:
        nvertex = self.nvertex
        label, labelend, endpoint = self.label, self.labelend, self.endpoint
        for s in self.blossomchilds[b]:
            self.blossomparent[s] = -1
            if s < nvertex:
                self.inblossom[s] = s
            elif endstage and self.dualvar[s] == 0:
                self._expand_blossom(s, endstage)
            else:
                for leaf in self.leaves(s):
                    self.inblossom[leaf] = s
        if not endstage and label[b] == 2:
            # Relabel the even-length path through the expanded inner blossom.
            childs = self.blossomchilds[b]
            endps = self.blossomendps[b]
            entrychild = self.inblossom[endpoint[labelend[b] ^ 1]]
            j = childs.index(entrychild)
            if j & 1:
                j -= len(childs)
                jstep, endptrick = 1, 0
            else:
                jstep, endptrick = -1, 1
            p = labelend[b]
            while j != 0:
                label[endpoint[p ^ 1]] = 0
                label[endpoint[endps[j - endptrick] ^ endptrick ^ 1]] = 0
                self.assign_label(endpoint[p ^ 1], 2, p)
                self.allowedge[endps[j - endptrick] >> 1] = True
                j += jstep
                p = endps[j - endptrick] ^ endptrick
                self.allowedge[p >> 1] = True
                j += jstep
            bv = childs[j]
            label[endpoint[p ^ 1]] = label[bv] = 2
            labelend[endpoint[p ^ 1]] = labelend[bv] = p
            self.bestedge[bv] = -1
            j += jstep
            while childs[j] != entrychild:
                bv = childs[j]
                if label[bv] == 1:
                    j += jstep
                    continue
                reached = -1
                for leaf in self.leaves(bv):
                    if label[leaf] != 0:
                        reached = leaf
                        break
                if reached != -1:
                    label[reached] = 0
                    label[endpoint[self.mate[self.blossombase[bv]]]] = 0
                    self.assign_label(reached, 2, labelend[reached])
                j += jstep
        label[b] = labelend[b] = -1
        self.blossomchilds[b] = self.blossomendps[b] = None
        self.blossombase[b] = -1
        self.blossombestedges[b] = None
        self.bestedge[b] = -1
        self.unusedblossoms.append(b)

    def _augment_blossom(self, b: int, v: int) -> None:
        t = v
        while self.blossomparent[t] != b:
            t = self.blossomparent[t]
        if t >= self.nvertex:
            self._augment_blossom(t, v)
        childs = self.blossomchilds[b]
        endps = self.blossomendps[b]
        i = j = childs.index(t)
        if i & 1:
            j -= len(childs)
            jstep, endptrick = 1, 0
        else:
            jstep, endptrick = -1, 1
        endpoint = self.endpoint
        while j != 0:
            j += jstep
            t = childs[j]
            p = endps[j - endptrick] ^ endptrick
            if t >= self.nvertex:
                self._augment_blossom(t, endpoint[p])
            j += jstep
            t = childs[j]
            if t >= self.nvertex:
                self._augment_blossom(t, endpoint[p ^ 1])
            self.mate[endpoint[p]] = p ^ 1
            self.mate[endpoint[p ^ 1]] = p
        self.blossomchilds[b] = childs[i:] + childs[:i]
        self.blossomendps[b] = endps[i:] + endps[:i]
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]]

    def _augment_matching(self, k: int) -> None:
        v, w, _ = self.edges[k]
        endpoint, labelend, inblossom = self.endpoint, self.labelend, self.inblossom
        for s, p in ((v, 2 * k + 1), (w, 2 * k)):
            while True:
                bs = inblossom[s]
                if bs >= self.nvertex:
                    self._augment_blossom(bs, s)
                self.mate[s] = p
                if labelend[bs] == -1:
                    break
                t = endpoint[labelend[bs]]
                bt = inblossom[t]
                s = endpoint[labelend[bt]]
                j = endpoint[labelend[bt] ^ 1]
                if bt >= self.nvertex:
                    self._augment_blossom(bt, j)
                self.mate[j] = labelend[bt]
                p = labelend[bt] ^ 1

    def _stage(self) -> bool:
        """Run one stage; return True if the matching was augmented."""
        nvertex = self.nvertex
        n2 = 2 * nvertex
        label, inblossom, endpoint = self.label, self.inblossom, self.endpoint
        label[:] = [0] * n2
        self.bestedge[:] = [-1] * n2
        self.blossombestedges[nvertex:] = [None] * nvertex
        self.allowedge[:] = [False] * len(self.edges)
        self.queue[:] = []
        for v in range(nvertex):
            if self.mate[v] == -1 and label[inblossom[v]] == 0:
                self.assign_label(v, 1, -1)

        while True:
            while self.queue:
                v = self.queue.pop()
                for p in self.neighbend[v]:
                    k = p >> 1
                    w = endpoint[p]
                    if inblossom[v] == inblossom[w]:
                        continue
                    kslack = 0
                    if not self.allowedge[k]:
                        kslack = self.slack(k)
                        if kslack <= 0:
                            self.allowedge[k] = True
                    if self.allowedge[k]:
                        lw = label[inblossom[w]]
                        if lw == 0:
                            self.assign_label(w, 2, p ^ 1)
                        elif lw == 1:
                            base = self._scan_blossom(v, w)
                            if base >= 0:
                                self._add_blossom(base, k)
                            else:
                                self._augment_matching(k)
                                return True
                        elif label[w] == 0:
                            label[w] = 2
                            self.labelend[w] = p ^ 1
                    elif label[inblossom[w]] == 1:
                        b = inblossom[v]
                        if self.bestedge[b] == -1 or kslack < self.slack(self.bestedge[b]):
                            self.bestedge[b] = k
                    elif label[w] == 0:
                        if self.bestedge[w] == -1 or kslack < self.slack(self.bestedge[w]):
                            self.bestedge[w] = k

            # No augmenting path under the current duals: adjust them.
            deltatype = -1
            delta = 0
            deltaedge = -1
            deltablossom = -1
            for v in range(nvertex):
                if label[inblossom[v]] == 0 and self.bestedge[v] != -1:
                    d = self.slack(self.bestedge[v])
                    if deltatype == -1 or d < delta:
                        delta, deltatype, deltaedge = d, 2, self.bestedge[v]
            for b in range(n2):
                if self.blossomparent[b] == -1 and label[b] == 1 and self.bestedge[b] != -1:
                    d = self.slack(self.bestedge[b]) // 2
                    if deltatype == -1 or d < delta:
                        delta, deltatype, deltaedge = d, 3, self.bestedge[b]
            for b in range(nvertex, n2):
                if (self.blossombase[b] >= 0 and self.blossomparent[b] == -1 and label[b] == 2
                        and (deltatype == -1 or self.dualvar[b] < delta)):
                    delta, deltatype, deltablossom = self.dualvar[b], 4, b
            if deltatype == -1:
                # Maximum cardinality reached; final dual shift keeps duals feasible.
                deltatype = 1
                delta = max(0, min(self.dualvar[:nvertex]))

            for v in range(nvertex):
                lv = label[inblossom[v]]
                if lv == 1:
                    self.dualvar[v] -= delta
                elif lv == 2:
                    self.dualvar[v] += delta
            for b in range(nvertex, n2):
                if self.blossombase[b] >= 0 and self.blossomparent[b] == -1:
                    if label[b] == 1:
                        self.dualvar[b] += delta
                    elif label[b] == 2:
                        self.dualvar[b] -= delta

            if deltatype == 1:
                return False
            if deltatype == 2:
                self.allowedge[deltaedge] = True
                i, j, _ = self.edges[deltaedge]
                if label[inblossom[i]] == 0:
                    i, j = j, i
                self.queue.append(i)
            elif deltatype == 3:
                self.allowedge[deltaedge] = True
                i, _, _ = self.edges[deltaedge]
                self.queue.append(i)
            else:
                self._expand_blossom(deltablossom, False)

    def run(self) -> list[int]:
        """Return ``mate`` as a vertex list (-1 for unmatched vertices)."""
        nvertex = self.nvertex
        for _ in range(nvertex):
            if not self._stage():
                break
            # End of stage: expand outer blossoms whose dual hit zero.
            for b in range(nvertex, 2 * nvertex):
                if (self.blossomparent[b] == -1 and self.blossombase[b] >= 0
                        and self.label[b] == 1 and self.dualvar[b] == 0):
                    self._expand_blossom(b, True)
        return [self.endpoint[p] if p >= 0 else -1 for p in self.mate]


def brute_force_perfect_matching(g: WeightedGraph) -> Optional[Matching]:
    """Exact minimum-weight perfect matching by DP over saturated-vertex subsets.

    Always pairs the lowest unsaturated vertex first, so the state space is
    the set of reachable masks.  Ties go to the lowest partner index.
    """
    if g.v > ORACLE_MAX_VERTICES:
        raise CapacityError(f"oracle supports at most {ORACLE_MAX_VERTICES} vertices, got {g.v}")
    if g.v % 2:
        return None
    adj: list[dict[int, tuple[int, int]]] = [{} for _ in range(g.v)]
    for idx, (a, b, wt) in enumerate(g.edges):
        adj[a][b] = (wt, idx)
        adj[b][a] = (wt, idx)
    full = (1 << g.v) - 1
    inf = float("inf")

    @lru_cache(maxsize=None)
    def best(mask: int) -> float:
        if mask == full:
            return 0
        i = (~mask & -~mask).bit_length() - 1
        out = inf
        for j in sorted(adj[i]):
            if mask >> j & 1:
                continue
            cand = adj[i][j][0] + best(mask | 1 << i | 1 << j)
            if cand < out:
                out = cand
        return out

    if best(0) == inf:
        return None
    chosen = []
    mask = 0
    while mask != full:
        i = (~mask & -~mask).bit_length() - 1
        target = best(mask)
        for j in sorted(adj[i]):
            if mask >> j & 1:
                continue
            wt, idx = adj[i][j]
            if wt + best(mask | 1 << i | 1 << j) == target:
                chosen.append(idx)
                mask |= 1 << i | 1 << j
                break
    return _finish(g, chosen)
