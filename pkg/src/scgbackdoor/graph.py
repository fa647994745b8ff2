"""Summary causal graphs, finite-window full-time graphs and basic queries.

An SCG is a directed graph over series names, cycles and self-loops
allowed.  An FTCG is a DAG over (series, time) pairs inside a finite
window whose arrows never go backwards in time and whose self-arrows are
strictly lagged.  Everything here is immutable once built.
"""

from __future__ import annotations

import json
import re
from collections import deque
from typing import Iterable, NamedTuple

from .errors import DuplicateEdge, InvalidGraph, OutOfWindow, ParseError, UnknownVertex

_BAD_NAME = re.compile(r"\s|->|[,;@#{}\"\[\]]")

FORMATS = ("json", "edgelist", "dot-subset")


def check_name(name) -> str:
    if not isinstance(name, str) or not name or _BAD_NAME.search(name):
        raise ValueError(f"invalid series name {name!r}")
    return name


class SCG:
    """Summary causal graph.  Vertices are kept sorted, edges as a frozenset."""

    __slots__ = ("vertices", "edges", "_parents", "_children", "_index", "_csr")

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        verts = sorted(set(check_name(v) for v in vertices))
        vset = set(verts)
        seen = set()
        for a, b in edges:
            if a not in vset:
                raise UnknownVertex(a)
            if b not in vset:
                raise UnknownVertex(b)
            if (a, b) in seen:
                raise DuplicateEdge((a, b))
            seen.add((a, b))
        self.vertices = tuple(verts)
        self.edges = frozenset(seen)
        parents = {v: [] for v in verts}
        children = {v: [] for v in verts}
        for a, b in sorted(seen):
            children[a].append(b)
            parents[b].append(a)
        self._parents = {v: tuple(sorted(p)) for v, p in parents.items()}
        self._children = {v: tuple(sorted(c)) for v, c in children.items()}
        self._index = {v: i for i, v in enumerate(verts)}
        self._csr = None

    def __eq__(self, other):
        return isinstance(other, SCG) and self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"SCG({list(self.vertices)}, {sorted(self.edges)})"

    def __contains__(self, v):
        return v in self._index

    def check(self, v):
        if v not in self._index:
            raise UnknownVertex(v)
        return v

    def index(self, v) -> int:
        return self._index[self.check(v)]

    def parents_of(self, v) -> tuple[str, ...]:
        return self._parents[self.check(v)]

    def children_of(self, v) -> tuple[str, ...]:
        return self._children[self.check(v)]

    def sorted_edges(self):
        return sorted(self.edges)


def parents(g: SCG, v: str) -> set[str]:
    return set(g.parents_of(v))


def children(g: SCG, v: str) -> set[str]:
    return set(g.children_of(v))


def _reach(start, step, strict):
    out = set()
    todo = deque()
    if strict:
        for w in step(start):
            if w not in out:
                out.add(w)
                todo.append(w)
    else:
        out.add(start)
        todo.append(start)
    while todo:
        u = todo.popleft()
        for w in step(u):
            if w not in out:
                out.add(w)
                todo.append(w)
    return out


def descendants(g: SCG, v: str, strict: bool = False) -> set[str]:
    """Desc(v); with strict=True only vertices reached by a non-empty path."""
    g.check(v)
    return _reach(v, g.children_of, strict)


def ancestors(g: SCG, v: str, strict: bool = False) -> set[str]:
    g.check(v)
    return _reach(v, g.parents_of, strict)


def has_big_cycle(g: SCG, v: str) -> bool:
    """True when v lies on a directed cycle other than its own self-loop."""
    desc = descendants(g, v, strict=True)
    desc.discard(v)
    if not desc:
        return False
    anc = ancestors(g, v, strict=True)
    return bool(desc & anc)


def induced_subgraph(g: SCG, keep: Iterable[str]) -> SCG:
    keep = set(keep)
    for v in keep:
        g.check(v)
    return SCG(keep, [(a, b) for a, b in g.edges if a in keep and b in keep])


# ---------------------------------------------------------------- parsing


def parse_scg(text: str, format: str = "edgelist") -> SCG:
    if format == "json":
        return _parse_json(text)
    if format == "edgelist":
        return _parse_edgelist(text)
    if format == "dot-subset":
        return _parse_dot(text)
    raise ValueError(f"unknown format {format!r}")


def _name_at(token, line):
    try:
        return check_name(token)
    except ValueError:
        raise ParseError(line, f"invalid series name {token!r}") from None


def _build(vertices, edges):
    seen = set()
    for e in edges:
        if e in seen:
            raise DuplicateEdge(e)
        seen.add(e)
    return SCG(vertices, edges)


def _parse_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise ParseError(1, 'expected an object with a "vertices" list')
    verts = doc["vertices"]
    raw_edges = doc.get("edges", [])
    if not isinstance(verts, list) or not isinstance(raw_edges, list):
        raise ParseError(1, '"vertices" and "edges" must be lists')
    names = [_name_at(v, 1) for v in verts]
    if len(set(names)) != len(names):
        raise ParseError(1, "duplicate vertex declaration")
    declared = set(names)
    edges = []
    for e in raw_edges:
        if not (isinstance(e, list) and len(e) == 2):
            raise ParseError(1, f"edge must be a pair, got {e!r}")
        a, b = (_name_at(x, 1) for x in e)
        for x in (a, b):
            if x not in declared:
                raise UnknownVertex(x)
        edges.append((a, b))
    return _build(names, edges)


def _parse_statement(stmt, lineno, verts, edges):
    if "->" in stmt:
        parts = [p.strip() for p in stmt.split("->")]
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError(lineno, f"malformed edge {stmt!r}")
        a, b = _name_at(parts[0], lineno), _name_at(parts[1], lineno)
        verts.update((a, b))
        edges.append((a, b))
    else:
        verts.add(_name_at(stmt, lineno))


def _parse_edgelist(text):
    verts, edges = set(), []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stmt = raw.split("#", 1)[0].strip()
        if stmt:
            _parse_statement(stmt, lineno, verts, edges)
    return _build(verts, edges)


_DOT_HEAD = re.compile(r"^\s*digraph(\s+[A-Za-z_][A-Za-z0-9_]*)?\s*\{", re.S)


def _parse_dot(text):
    head = _DOT_HEAD.match(text)
    if not head:
        raise ParseError(1, "expected 'digraph {'")
    close = text.rfind("}")
    if close < head.end() or text[close + 1:].strip():
        raise ParseError(text.count("\n") + 1, "expected closing '}' at end of input")
    body = text[head.end():close]
    lineno = text[:head.end()].count("\n") + 1
    verts, edges = set(), []
    for raw in body.split("\n"):
        for stmt in raw.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            if "[" in stmt or "=" in stmt:
                raise ParseError(lineno, "attributes are not supported")
            _parse_statement(stmt, lineno, verts, edges)
        lineno += 1
    return _build(verts, edges)


def serialize_scg(g: SCG, format: str = "edgelist") -> str:
    """Canonical text: vertices sorted, edges sorted lexicographically."""
    edges = g.sorted_edges()
    if format == "json":
        return json.dumps({"vertices": list(g.vertices), "edges": [list(e) for e in edges]})
    used = {v for e in edges for v in e}
    lonely = [v for v in g.vertices if v not in used]
    if format == "edgelist":
        return "".join(f"{v}\n" for v in lonely) + "".join(f"{a} -> {b}\n" for a, b in edges)
    if format == "dot-subset":
        body = [f"  {v};" for v in lonely] + [f"  {a} -> {b};" for a, b in edges]
        return "digraph {\n" + "".join(s + "\n" for s in body) + "}\n"
    raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------- FTCGs


class TemporalVertex(NamedTuple):
    series: str
    time: int

    def __str__(self):
        return f"{self.series}@{self.time}"


TV = TemporalVertex


class FTCG:
    """Finite-window full-time causal graph.

    ``validate=False`` skips the acyclicity / ordering checks; the oracle
    uses it for candidates it generates already valid by construction.
    """

    __slots__ = ("series", "window", "edges", "_parents", "_children")

    def __init__(self, series, window, edges=(), validate=True):
        self.series = tuple(sorted(set(series)))
        lo, hi = window
        if lo > hi:
            raise ValueError(f"empty window {window}")
        self.window = (int(lo), int(hi))
        self.edges = frozenset((TV(*a), TV(*b)) for a, b in edges)
        self._parents = None
        self._children = None
        if validate:
            self._validate()

    def _validate(self):
        names = set(self.series)
        lo, hi = self.window
        for a, b in self.edges:
            for v in (a, b):
                if v.series not in names:
                    raise UnknownVertex(v.series)
                if not lo <= v.time <= hi:
                    raise OutOfWindow(v, self.window)
            if a.time > b.time:
                raise InvalidGraph(f"arrow {a} -> {b} goes backwards in time")
            if a.series == b.series and a.time == b.time:
                raise InvalidGraph(f"self-arrow at {a} must be lagged")
        if not is_acyclic(self.edges):
            raise InvalidGraph("FTCG contains a directed cycle")

    @property
    def vertices(self):
        lo, hi = self.window
        return [TV(s, t) for t in range(lo, hi + 1) for s in self.series]

    def __contains__(self, v):
        return v.series in self.series and self.window[0] <= v.time <= self.window[1]

    def _adj(self):
        if self._parents is None:
            par, ch = {}, {}
            for a, b in sorted(self.edges):
                ch.setdefault(a, []).append(b)
                par.setdefault(b, []).append(a)
            self._parents, self._children = par, ch
        return self._parents, self._children

    def parents_of(self, v):
        return self._adj()[0].get(v, [])

    def children_of(self, v):
        return self._adj()[1].get(v, [])

    def __eq__(self, other):
        return (isinstance(other, FTCG) and self.series == other.series
                and self.window == other.window and self.edges == other.edges)

    def __hash__(self):
        return hash((self.series, self.window, self.edges))

    def __repr__(self):
        arrows = ", ".join(f"{a}->{b}" for a, b in sorted(self.edges))
        return f"FTCG(window={list(self.window)}, [{arrows}])"


def is_acyclic(edges) -> bool:
    """Kahn's algorithm; only same-time arrows can close a cycle."""
    inst = [(a, b) for a, b in edges if a.time == b.time]
    indeg, out = {}, {}
    for a, b in inst:
        out.setdefault(a, []).append(b)
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)
    todo = [v for v, d in indeg.items() if d == 0]
    done = 0
    while todo:
        v = todo.pop()
        done += 1
        for w in out.get(v, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                todo.append(w)
    return done == len(indeg)


def mutilate(f: FTCG, cut_incoming=(), cut_outgoing=()) -> FTCG:
    """Copy of f without the incoming edges of cut_incoming and the
    outgoing edges of cut_outgoing."""
    cin, cout = {TV(*v) for v in cut_incoming}, {TV(*v) for v in cut_outgoing}
    for v in cin | cout:
        if v not in f:
            raise OutOfWindow(v, f.window)
    kept = [(a, b) for a, b in f.edges if b not in cin and a not in cout]
    return FTCG(f.series, f.window, kept, validate=False)


def ftcg_descendants(f: FTCG, v) -> set:
    return _reach(TV(*v), f.children_of, strict=False)


class PathF(NamedTuple):
    """A path in an FTCG.  ``arrows[k]`` orients the edge between
    ``vertices[k]`` and ``vertices[k+1]``: "->" means it points forward
    along the path, "<-" backward."""

    vertices: tuple
    arrows: tuple

    def edges(self):
        out = []
        for k, arrow in enumerate(self.arrows):
            a, b = self.vertices[k], self.vertices[k + 1]
            out.append((a, b) if arrow == "->" else (b, a))
        return out

    def is_simple(self):
        return len(set(self.vertices)) == len(self.vertices)

    def is_backdoor(self):
        return bool(self.arrows) and self.arrows[0] == "<-"

    def is_collider_free(self):
        return not any(self.arrows[k] == "->" and self.arrows[k + 1] == "<-"
                       for k in range(len(self.arrows) - 1))

    def in_graph(self, f: FTCG):
        return self.is_simple() and all(e in f.edges for e in self.edges())

    def to_json(self):
        out = []
        for k, v in enumerate(self.vertices):
            item = {"series": v.series, "time": v.time}
            if k < len(self.arrows):
                item["arrow"] = self.arrows[k]
            out.append(item)
        return out

    def __str__(self):
        parts = [f"{self.vertices[0].series}_{self.vertices[0].time}"]
        for arrow, v in zip(self.arrows, self.vertices[1:]):
            parts.append(f" {'→' if arrow == '->' else '←'} {v.series}_{v.time}")
        return "".join(parts)
