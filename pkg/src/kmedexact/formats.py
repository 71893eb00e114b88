"""Plain-text instance formats.

All formats are UTF-8, whitespace separated, and ignore blank lines and
lines starting with ``#``.  The first meaningful line is a magic header::

    KMED 1        n k [ASYM]        then n rows of n integers
    KMEDFL 1      n m k             then n rows of m integers (client -> facility)
    GRAPH 1       n m               then m lines "u v" (0-indexed)
    SETCOVER 1    n m k             then m lines "size e1 e2 ..."
    WGRAPH 1      v e               then e lines "u w weight"  (matcher debugging)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .facility import FLInstance
from .matching import WeightedGraph
from .metric import InstanceError, MetricInstance
from .reductions import SetSystem, SimpleGraph

MAGICS = ("KMED", "KMEDFL", "GRAPH", "SETCOVER", "WGRAPH")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class KMedFile:
    instance: MetricInstance
    k: int


Parsed = Union[KMedFile, FLInstance, SimpleGraph, SetSystem, WeightedGraph]


class _Lines:
    """Meaningful lines as lists of (token, line, column)."""

    def __init__(self, text: str):
        self.rows = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            if raw.lstrip().startswith("#") or not raw.strip():
                continue
            toks = []
            col = 0
            for tok in raw.split():
                col = raw.index(tok, col)
                toks.append((tok, lineno, col + 1))
                col += len(tok)
            self.rows.append(toks)
        self.pos = 0

    def next(self, what: str):
        if self.pos >= len(self.rows):
            last = self.rows[-1][0][1] if self.rows else 0
            raise ParseError(f"unexpected end of file, expected {what}", last + 1, 1)
        row = self.rows[self.pos]
        self.pos += 1
        return row

    def done(self) -> None:
        if self.pos < len(self.rows):
            tok, line, col = self.rows[self.pos][0]
            raise ParseError(f"unexpected trailing content {tok!r}", line, col)


def _ints(row, count: int, what: str, anchor=None) -> list[int]:
    if len(row) != count:
        ref = row[min(len(row), count + 1) - 1] if row else anchor
        line, col = (ref[1], ref[2]) if ref else (0, 0)
        raise ParseError(f"expected {count} integers for {what}, found {len(row)}", line, col)
    out = []
    for tok, line, col in row:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"non-integer token {tok!r}", line, col) from None
    return out


def parse_text(text: str) -> Parsed:
    lines = _Lines(text)
    head = lines.next("header")
    magic, line, col = head[0]
    if magic not in MAGICS:
        raise ParseError(f"unrecognized header {magic!r}", line, col)
    if len(head) != 2 or head[1][0] != "1":
        raise ParseError(f"unsupported {magic} version", line, col)
    return _PARSERS[magic](lines)


def parse_instance(path: Union[str, Path]) -> Parsed:
    return parse_text(Path(path).read_text(encoding="utf-8"))


def _parse_kmed(lines: _Lines) -> KMedFile:
    row = lines.next("'n k'")
    asym = len(row) == 3 and row[2][0] == "ASYM"
    n, k = _ints(row[:2] if asym else row, 2, "'n k'")
    if n < 1:
        raise ParseError("n must be positive", row[0][1], row[0][2])
    if not 1 <= k <= n:
        raise ParseError(f"k={k} must satisfy 1 <= k <= n", row[1][1], row[1][2])
    rows = []
    first = None
    for i in range(n):
        r = lines.next(f"matrix row {i}")
        first = first or r
        vals = _ints(r, n, f"matrix row {i}")
        for j, v in enumerate(vals):
            if v < 0:
                raise ParseError(f"negative distance at ({i},{j})", r[j][1], r[j][2])
            if i == j and v != 0:
                raise ParseError(f"nonzero diagonal at ({i},{i})", r[j][1], r[j][2])
            if not asym and j < i and v != rows[j][i]:
                raise ParseError(f"asymmetry at ({j},{i})", r[j][1], r[j][2])
        rows.append(tuple(vals))
    lines.done()
    try:
        inst = MetricInstance(tuple(rows), symmetric=not asym)
    except InstanceError as exc:
        raise ParseError(str(exc), first[0][1], 1) from None
    return KMedFile(inst, k)


def _parse_kmedfl(lines: _Lines) -> FLInstance:
    row = lines.next("'n m k'")
    n, m, k = _ints(row, 3, "'n m k'")
    if n < 1 or m < 1:
        raise ParseError("n and m must be positive", row[0][1], row[0][2])
    rows = []
    for i in range(n):
        r = lines.next(f"distance row {i}")
        vals = _ints(r, m, f"distance row {i}")
        for j, v in enumerate(vals):
            if v < 0:
                raise ParseError(f"negative distance at ({i},{j})", r[j][1], r[j][2])
        rows.append(tuple(vals))
    lines.done()
    try:
        return FLInstance(tuple(rows), k)
    except ValueError as exc:
        raise ParseError(str(exc), row[0][1], 1) from None


def _parse_graph(lines: _Lines) -> SimpleGraph:
    row = lines.next("'n m'")
    n, m = _ints(row, 2, "'n m'")
    edges = []
    for e in range(m):
        r = lines.next(f"edge {e}")
        u, v = _ints(r, 2, f"edge {e}")
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ParseError(f"invalid edge ({u}, {v})", r[0][1], r[0][2])
        edges.append((u, v))
    lines.done()
    try:
        return SimpleGraph(n, tuple(edges))
    except ValueError as exc:
        raise ParseError(str(exc), row[0][1], 1) from None


def _parse_setcover(lines: _Lines) -> SetSystem:
    row = lines.next("'n m k'")
    n, m, k = _ints(row, 3, "'n m k'")
    sets = []
    for j in range(m):
        r = lines.next(f"set {j}")
        size = _ints(r[:1], 1, f"size of set {j}")[0]
        if size <= 0:
            raise ParseError(f"set {j} is empty", r[0][1], r[0][2])
        elems = _ints(r[1:], size, f"set {j}", anchor=r[0])
        for (tok, line, col), x in zip(r[1:], elems):
            if not 0 <= x < n:
                raise ParseError(f"element {x} outside universe", line, col)
        sets.append(tuple(elems))
    lines.done()
    try:
        return SetSystem(n, tuple(sets), k)
    except ValueError as exc:
        raise ParseError(str(exc), row[0][1], 1) from None


def _parse_wgraph(lines: _Lines) -> WeightedGraph:
    row = lines.next("'v e'")
    v, e = _ints(row, 2, "'v e'")
    edges = []
    for i in range(e):
        r = lines.next(f"edge {i}")
        a, b, w = _ints(r, 3, f"edge {i}")
        edges.append((a, b, w))
    lines.done()
    try:
        return WeightedGraph.from_edges(v, edges)
    except ValueError as exc:
        raise ParseError(str(exc), row[0][1], 1) from None


_PARSERS = {
    "KMED": _parse_kmed,
    "KMEDFL": _parse_kmedfl,
    "GRAPH": _parse_graph,
    "SETCOVER": _parse_setcover,
    "WGRAPH": _parse_wgraph,
}


def _matrix(rows) -> list[str]:
    return [" ".join(str(x) for x in r) for r in rows]


def format_value(value: Parsed) -> str:
    if isinstance(value, KMedFile):
        inst = value.instance
        head = f"{inst.n} {value.k}" + ("" if inst.symmetric else " ASYM")
        lines = ["KMED 1", head, *_matrix(inst.dist)]
    elif isinstance(value, FLInstance):
        lines = ["KMEDFL 1", f"{value.n} {value.m} {value.k}", *_matrix(value.dist)]
    elif isinstance(value, SimpleGraph):
        lines = ["GRAPH 1", f"{value.n} {len(value.edges)}", *_matrix(value.edges)]
    elif isinstance(value, SetSystem):
        lines = ["SETCOVER 1", f"{value.n} {value.m} {value.k}"]
        lines += [" ".join(str(x) for x in (len(s), *s)) for s in value.sets]
    elif isinstance(value, WeightedGraph):
        lines = ["WGRAPH 1", f"{value.v} {len(value.edges)}", *_matrix(value.edges)]
    else:
        raise TypeError(f"cannot format {type(value).__name__}")
    return "\n".join(lines) + "\n"


def write_instance(path: Union[str, Path], value: Parsed) -> None:
    Path(path).write_text(format_value(value), encoding="utf-8")
