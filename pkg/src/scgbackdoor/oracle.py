"""Brute-force ground truth over bounded windows.

Two engines answer the same questions.

``enumerate``
    Walks every candidate FTCG of the window (bitmask order over the
    canonically sorted possible arrows) and inspects each one.  Exact but
    only feasible for a handful of possible arrows.

``paths``
    Exhaustive DFS over simple paths of the *union* graph of all possible
    arrows.  Under subgraph-reduction a simple path whose arrows are all
    possible is itself contained in a candidate (the FTCG made of just those
    arrows; under consistency, those arrow patterns repeated at every time,
    which is acyclic as long as the same-time pattern the path uses is).
    So "some candidate contains such a path" can be decided path by path,
    which scales to the sweep sizes where enumeration cannot.

Nothing here uses thresholds, ceilings or any SCG-level shortcut from the
decision procedures.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations

from .errors import BudgetExceeded, OutOfWindow, OverlapError
from .graph import FTCG, SCG, TV, PathF, is_acyclic, mutilate

DEFAULT_BUDGET = 2 ** 22
BUDGET_ENV = "SCGBACKDOOR_BUDGET"

EXACT = "exact-reduction"
SUBGRAPH = "subgraph-reduction"


def default_budget():
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        value = int(raw)
        if value <= 0:
            raise ValueError(f"{BUDGET_ENV} must be positive")
        return value
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class EnumSpec:
    scg: SCG
    window: tuple
    max_lag: int
    consistency: bool = False
    relaxation: str = SUBGRAPH

    def __post_init__(self):
        lo, hi = self.window
        object.__setattr__(self, "window", (int(lo), int(hi)))
        if self.relaxation not in (EXACT, SUBGRAPH):
            raise ValueError(f"unknown relaxation {self.relaxation!r}")
        if self.max_lag < 0:
            raise ValueError("max_lag must be non-negative")
        if any(a == b for a, b in self.scg.edges) and self.max_lag < 1:
            raise ValueError("self-loops need max_lag >= 1")
        if hi - lo < self.max_lag:
            raise ValueError("window narrower than max_lag")

    def contains(self, v):
        return self.window[0] <= v.time <= self.window[1]


def default_window(query):
    """[-(G+2), t] and max lag G+1, G the largest gap before the effect."""
    y = query.effect
    gamma = max([y.time - v.time for v in query.interventions] + [0])
    return (y.time - gamma - 2, y.time), gamma + 1


def default_spec(g, query, consistency=False):
    window, max_lag = default_window(query)
    return EnumSpec(g, window, max_lag, consistency)


@dataclass
class OracleVerdict:
    exists_witness: bool
    witness: PathF | None = None
    ftcg: FTCG | None = None
    explored: int = 0
    engine: str = ""


# ------------------------------------------------------------ candidates


def reduce(f: FTCG) -> SCG:
    return SCG(f.series, {(a.series, b.series) for a, b in f.edges})


def arrow_patterns(spec: EnumSpec):
    """(A, B, lag) triples allowed by the SCG, canonical order."""
    out = []
    for a, b in spec.scg.sorted_edges():
        for lag in range(1 if a == b else 0, spec.max_lag + 1):
            out.append((a, b, lag))
    return out


def possible_arrows(spec: EnumSpec):
    lo, hi = spec.window
    out = []
    for a, b, lag in arrow_patterns(spec):
        for t in range(lo + lag, hi + 1):
            out.append((TV(a, t - lag), TV(b, t)))
    return out


def _replicate(spec, patterns):
    lo, hi = spec.window
    return [(TV(a, t - lag), TV(b, t)) for a, b, lag in patterns for t in range(lo + lag, hi + 1)]


def _pattern_acyclic(patterns):
    inst = {(a, b) for a, b, lag in patterns if lag == 0}
    return _series_acyclic(inst)


def _series_acyclic(pairs):
    out = {}
    indeg = {}
    for a, b in pairs:
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


def count_raw_candidates(spec: EnumSpec) -> int:
    units = arrow_patterns(spec) if spec.consistency else possible_arrows(spec)
    return 2 ** len(units)


def enumerate_candidates(spec: EnumSpec, budget=None):
    """Yield every candidate FTCG of the window.

    Raises BudgetExceeded up front when the raw number of subsets to scan
    is larger than the budget, rather than silently truncating.
    """
    budget = default_budget() if budget is None else budget
    raw = count_raw_candidates(spec)
    if raw > budget:
        raise BudgetExceeded(budget)
    series = spec.scg.vertices
    want = spec.scg.edges
    if spec.consistency:
        units = arrow_patterns(spec)
        for mask in range(raw):
            chosen = [u for k, u in enumerate(units) if mask >> k & 1]
            if not _pattern_acyclic(chosen):
                continue
            edges = _replicate(spec, chosen)
            if spec.relaxation == EXACT and {(a.series, b.series) for a, b in edges} != want:
                continue
            yield FTCG(series, spec.window, edges, validate=False)
    else:
        units = possible_arrows(spec)
        for mask in range(raw):
            edges = [u for k, u in enumerate(units) if mask >> k & 1]
            if not is_acyclic(edges):
                continue
            if spec.relaxation == EXACT and {(a.series, b.series) for a, b in edges} != want:
                continue
            yield FTCG(series, spec.window, edges, validate=False)


# ------------------------------------------------------------ d-separation


def _ancestral(f, seeds):
    out = set(seeds)
    todo = list(seeds)
    while todo:
        v = todo.pop()
        for p in f.parents_of(v):
            if p not in out:
                out.add(p)
                todo.append(p)
    return out


def d_separated(f: FTCG, a, b, z) -> bool:
    """Moralized ancestral graph test."""
    a, b = TV(*a), TV(*b)
    z = {TV(*v) for v in z}
    for v in (a, b, *z):
        if v not in f:
            raise OutOfWindow(v, f.window)
    if a == b:
        return False
    if a in z or b in z:
        return True
    keep = _ancestral(f, {a, b} | z)
    nbrs = {v: set() for v in keep}
    for x, y in f.edges:
        if x in keep and y in keep:
            nbrs[x].add(y)
            nbrs[y].add(x)
    for v in keep:
        ps = [p for p in f.parents_of(v) if p in keep]
        for p, r in combinations(ps, 2):
            nbrs[p].add(r)
            nbrs[r].add(p)
    seen = {a}
    todo = [a]
    while todo:
        v = todo.pop()
        for w in nbrs[v]:
            if w in z or w in seen:
                continue
            if w == b:
                return False
            seen.add(w)
            todo.append(w)
    return True


def path_blocked(f: FTCG, path: PathF, z) -> bool:
    """Direct blocking check of one path (used to cross-check d_separated)."""
    z = set(z)
    zanc = _ancestral(f, z)
    for k in range(1, len(path.vertices) - 1):
        v = path.vertices[k]
        collider = path.arrows[k - 1] == "->" and path.arrows[k] == "<-"
        if collider:
            if v not in zanc:
                return True
        elif v in z:
            return True
    return False


def all_paths(f: FTCG, a, b):
    """Every simple path between a and b, ignoring orientation."""
    a, b = TV(*a), TV(*b)
    out = []

    def rec(v, verts, arrows):
        if v == b:
            out.append(PathF(tuple(verts), tuple(arrows)))
            return
        steps = [(w, "->") for w in f.children_of(v)] + [(w, "<-") for w in f.parents_of(v)]
        for w, arrow in sorted(steps):
            if w in verts:
                continue
            verts.append(w)
            arrows.append(arrow)
            rec(w, verts, arrows)
            verts.pop()
            arrows.pop()

    rec(a, [a], [])
    return out


def backdoor_criterion(f: FTCG, xs, ys, z) -> bool:
    """Multivariate backdoor criterion relative to intervention set xs."""
    xs = [TV(*x) for x in xs]
    ys = [TV(*y) for y in ys]
    z = {TV(*v) for v in z}
    if z & set(xs) or z & set(ys) or set(xs) & set(ys):
        raise OverlapError("interventions, effects and adjustment set must be disjoint")
    for x in xs:
        desc = _descendants(f, x)
        if z & desc:
            return False
    # blocking every backdoor path from x equals d-separation once all
    # outgoing edges of x (and of the other interventions) are cut
    cut = mutilate(f, (), xs)
    for x in xs:
        for y in ys:
            if not d_separated(cut, x, y, z):
                return False
    return True


def _descendants(f, v):
    out = {v}
    todo = [v]
    while todo:
        u = todo.pop()
        for w in f.children_of(u):
            if w not in out:
                out.add(w)
                todo.append(w)
    return out


# ------------------------------------------------------------ union graph


class _Union:
    """Adjacency of all possible arrows of a spec, with lags."""

    def __init__(self, spec):
        self.spec = spec
        self.children = {}
        self.parents = {}
        for a, b in possible_arrows(spec):
            self.children.setdefault(a, []).append(b)
            self.parents.setdefault(b, []).append(a)
        for d in (self.children, self.parents):
            for v in d:
                d[v].sort()


class _Counter:
    def __init__(self, budget):
        self.budget = budget
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.budget:
            raise BudgetExceeded(self.budget, "search steps")


def _adds_cycle(pattern, a, b):
    # would the same-time series arrow a -> b close a cycle with pattern?
    if a == b:
        return True
    todo = [b]
    seen = {b}
    while todo:
        v = todo.pop()
        for x, y in pattern:
            if x == v and y not in seen:
                if y == a:
                    return True
                seen.add(y)
                todo.append(y)
    return False


def _materialize(spec, arrows):
    """Smallest candidate FTCG containing the given arrows."""
    if spec.consistency:
        patterns = sorted({(a.series, b.series, b.time - a.time) for a, b in arrows})
        edges = _replicate(spec, patterns)
    else:
        edges = list(arrows)
    return FTCG(spec.scg.vertices, spec.window, edges)


def _reach_states(spec, union, start, forward, allowed, counter):
    """Vertices reachable from start along directed arrows (walking with
    the arrows when forward, against them otherwise), staying inside allowed.
    Under consistency the state carries the same-time series pattern used
    so far, which must remain acyclic."""
    adj = union.children if forward else union.parents

    def step_of(v):
        return adj.get(v, ())

    if not spec.consistency:
        seen = {start}
        todo = [start]
        while todo:
            v = todo.pop()
            for w in step_of(v):
                counter.tick()
                if w not in seen and allowed(w):
                    seen.add(w)
                    todo.append(w)
        return seen
    reached = {start}
    states = {(start, frozenset())}
    todo = [(start, frozenset())]
    while todo:
        v, pat = todo.pop()
        for w in step_of(v):
            counter.tick()
            if not allowed(w):
                continue
            if v.time == w.time:
                a, b = (v.series, w.series) if forward else (w.series, v.series)
                if (a, b) not in pat:
                    if _adds_cycle(pat, a, b):
                        continue
                    npat = pat | {(a, b)}
                else:
                    npat = pat
            else:
                npat = pat
            if (w, npat) not in states:
                states.add((w, npat))
                reached.add(w)
                todo.append((w, npat))
    return reached


def oracle_cd(spec: EnumSpec, query, budget=None, engine="paths"):
    """Window vertices that descend from some intervention in some
    candidate, with the other interventions' edges cut."""
    budget = default_budget() if budget is None else budget
    ivs = [TV(*v) for v in query.interventions]
    if engine == "enumerate" or spec.relaxation == EXACT:
        out = set(v for v in ivs if spec.contains(v))
        for f in enumerate_candidates(spec, budget):
            for x in ivs:
                others = [v for v in ivs if v != x]
                out |= _descendants(mutilate(f, others, others), x)
        return out
    union = _Union(spec)
    counter = _Counter(budget)
    out = set(v for v in ivs if spec.contains(v))
    for x in ivs:
        others = set(ivs) - {x}
        out |= _reach_states(spec, union, x, True, lambda w: w not in others, counter)
    return out


def oracle_accessible(spec: EnumSpec, query, anchor, cd=None, budget=None):
    """Window vertices with a directed path to anchor, in some candidate,
    whose vertices other than the anchor all lie in NC = CD minus the
    interventions."""
    budget = default_budget() if budget is None else budget
    anchor = TV(*anchor)
    if cd is None:
        cd = oracle_cd(spec, query, budget)
    ivs = set(TV(*v) for v in query.interventions)
    nc = cd - ivs
    union = _Union(spec)
    counter = _Counter(budget)
    got = _reach_states(spec, union, anchor, False, lambda w: w in nc and w != anchor, counter)
    got.discard(anchor)
    return got


def witness_search(spec: EnumSpec, query, region=None, budget=None, engine="auto"):
    """Look for a collider-free backdoor path X^i ... Y inside region in
    the mutilated graph of some candidate.  region defaults to the oracle's
    own CD.  Interventions are tried in canonical order and the first
    witness in DFS order wins."""
    budget = default_budget() if budget is None else budget
    if engine == "auto":
        engine = "enumerate" if spec.relaxation == EXACT else "paths"
    if region is None:
        cd = oracle_cd(spec, query, budget, engine=engine)
        region = cd.__contains__
    if engine == "enumerate":
        return _witness_enumerate(spec, query, region, budget)
    return _witness_paths(spec, query, region, budget)


def _witness_paths(spec, query, region, budget):
    union = _Union(spec)
    counter = _Counter(budget)
    y = query.effect
    ivs = sorted(TV(*v) for v in query.interventions)
    if not region(y):
        return OracleVerdict(False, explored=0, engine="paths")
    for x in ivs:
        if not region(x):
            continue
        others = set(ivs) - {x}
        found = _dfs_fork_path(spec, union, x, y, others, region, counter)
        if found is not None:
            verts, arrows = found
            path = PathF(tuple(verts), tuple(arrows))
            return OracleVerdict(True, path, _materialize(spec, path.edges()), counter.count, "paths")
    return OracleVerdict(False, explored=counter.count, engine="paths")


def _dfs_fork_path(spec, union, x, y, others, region, counter, fork=None):
    """Simple paths x <- ... <- F -> ... -> y, F possibly y itself.
    When fork is given the path must turn exactly there."""
    verts = [x]
    arrows = []
    on_path = {x}
    consistent = spec.consistency

    def ok(w):
        return w not in on_path and w not in others and region(w)

    def rec(v, forward, pattern):
        counter.tick()
        if v == y and arrows:
            return fork is None or forward or fork == y
        steps = union.children.get(v, ()) if forward else union.parents.get(v, ())
        nexts = [(w, forward) for w in steps]
        if not forward and arrows and (fork is None or v == fork):
            nexts += [(w, True) for w in union.children.get(v, ())]
        for w, fwd in nexts:
            if not ok(w):
                continue
            if fwd and w.time > y.time:
                continue
            npat = pattern
            if consistent and w.time == v.time:
                a, b = (v.series, w.series) if fwd else (w.series, v.series)
                if (a, b) not in pattern:
                    if _adds_cycle(pattern, a, b):
                        continue
                    npat = pattern | {(a, b)}
            verts.append(w)
            arrows.append("->" if fwd else "<-")
            on_path.add(w)
            if rec(w, fwd, npat):
                return True
            verts.pop()
            arrows.pop()
            on_path.discard(w)
        return False

    if rec(x, False, frozenset()):
        return verts, arrows
    return None


def _witness_enumerate(spec, query, region, budget):
    y = query.effect
    ivs = sorted(TV(*v) for v in query.interventions)
    seen = 0
    for f in enumerate_candidates(spec, budget):
        seen += 1
        for x in ivs:
            others = [v for v in ivs if v != x]
            g = mutilate(f, others, others)
            path = _fork_path_in(g, x, y, region)
            if path is not None:
                return OracleVerdict(True, path, f, seen, "enumerate")
    return OracleVerdict(False, explored=seen, engine="enumerate")


def _fork_path_in(f, x, y, region):
    verts = [x]
    arrows = []
    on_path = {x}
    if not region(x) or not region(y):
        return None

    def rec(v, forward):
        if v == y and arrows:
            return True
        nexts = [(w, True) for w in f.children_of(v)]
        if not forward:
            nexts = [(w, False) for w in f.parents_of(v)] + (nexts if arrows else [])
        for w, fwd in nexts:
            if w in on_path or not region(w):
                continue
            verts.append(w)
            arrows.append("->" if fwd else "<-")
            on_path.add(w)
            if rec(w, fwd):
                return True
            verts.pop()
            arrows.pop()
            on_path.discard(w)
        return False

    if rec(x, False):
        return PathF(tuple(verts), tuple(arrows))
    return None


# ------------------------------------------------------------ witness check


def embed_witness(spec: EnumSpec, query, path: PathF, region):
    """Return a candidate FTCG (of the spec) in whose mutilated graph the
    path is a simple collider-free backdoor path from an intervention to
    the effect lying inside region; None when it does not embed."""
    verts = [TV(*v) for v in path.vertices]
    ivs = [TV(*v) for v in query.interventions]
    if not verts or verts[0] not in ivs or verts[-1] != query.effect:
        return None
    if not (path.is_simple() and path.is_backdoor() and path.is_collider_free()):
        return None
    others = set(ivs) - {verts[0]}
    if any(v in others or not region(v) or not spec.contains(v) for v in verts):
        return None
    allowed = set(possible_arrows(spec))
    edges = PathF(tuple(verts), tuple(path.arrows)).edges()
    if any(e not in allowed for e in edges):
        return None
    if spec.consistency:
        inst = {(a.series, b.series) for a, b in edges if a.time == b.time}
        if not _series_acyclic(inst):
            return None
    return _materialize(spec, edges)


def embed_through(spec: EnumSpec, query, x, fork, region, budget=None):
    """Any witness from intervention x whose turning vertex is fork.

    Used when a decider sketch glued from two chains cannot be realized
    as is under consistency; the fork and intervention it names must still
    carry some witness.
    """
    budget = default_budget() if budget is None else budget
    union = _Union(spec)
    counter = _Counter(budget)
    x, fork = TV(*x), TV(*fork)
    others = {TV(*v) for v in query.interventions} - {x}
    found = _dfs_fork_path(spec, union, x, query.effect, others, region, counter, fork)
    if found is None:
        return None
    verts, arrows = found
    return PathF(tuple(verts), tuple(arrows))
