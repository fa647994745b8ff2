"""Identifiability by common backdoor: the decision procedures.

``decide`` prunes the query, looks for a backdoor path without fork that
reaches an instantaneous intervention, then for a fork (two flavours: the
general one and the one valid under consistency throughout time).  When
none fires the complement of the cone of descendants is a common backdoor
set.  Multi-effect queries are split per effect.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from .accessibility import (compute_accessibility, compute_accessibility_combined,
                            fork_exists_free)
from .cone import CausalQuery, NCProfile, compute_t_nc, in_nc, validate_query
from .errors import NotIdentifiable
from .extint import is_finite, to_json
from .graph import SCG, TV, PathF, descendants

NO_FORK = "directed-no-fork"
FORK = "fork"


# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class Witness:
    """SCG-level sketch of a collider-free backdoor path X^i ... Y.

    ``path`` starts at the intervention and ends at the effect; ``fork`` is
    the vertex where the path turns from going against the arrows to going
    with them (the effect itself for a path without fork).  ``rule`` names
    the test that fired.
    """

    kind: str
    intervention: TV
    fork: TV
    path: PathF
    rule: str

    def to_json(self):
        return {
            "kind": self.kind,
            "rule": self.rule,
            "intervention": {"series": self.intervention.series, "time": self.intervention.time},
            "fork": {"series": self.fork.series, "time": self.fork.time},
            "path": self.path.to_json(),
        }

    def shifted(self, delta):
        def mv(v):
            return TV(v.series, v.time + delta)
        path = PathF(tuple(mv(v) for v in self.path.vertices), self.path.arrows)
        return Witness(self.kind, mv(self.intervention), mv(self.fork), path, self.rule)


@dataclass(frozen=True)
class AdjustmentSet:
    """Symbolic (infinite) set of temporal vertices.

    kinds:
      complement-of-CD / A1   S_t with t < bounds[S], interventions excluded
      A0                      every S_t with t < 0, plus Z_0 for Z in series
      Agamma                  Z_t with t <= -gamma for Z in series, minus exclude
      empty                   nothing
      union                   union of parts (multi-effect queries)
    ``shift`` moves the whole set in time (per-effect normalization).
    """

    kind: str
    bounds: dict = field(default_factory=dict)
    series: tuple = ()
    up_to: int = 0
    exclude: frozenset = frozenset()
    parts: tuple = ()
    shift: int = 0

    def contains(self, v) -> bool:
        v = TV(*v)
        if self.kind == "union":
            return any(p.contains(v) for p in self.parts)
        u = TV(v.series, v.time - self.shift)
        if self.kind == "empty":
            return False
        if u in self.exclude:
            return False
        if self.kind in ("complement-of-CD", "A1"):
            return u.time < self.bounds[u.series]
        if self.kind == "A0":
            return u.time < 0 or (u.time == 0 and u.series in self.series)
        if self.kind == "Agamma":
            return u.time <= self.up_to and u.series in self.series
        raise ValueError(self.kind)

    def materialize(self, series, window):
        lo, hi = window
        return {TV(s, t) for s in series for t in range(lo, hi + 1) if self.contains(TV(s, t))}

    def describe(self) -> str:
        if self.kind == "union":
            return " ∪ ".join(f"({p.describe()})" for p in self.parts)
        if self.kind == "empty":
            return "∅"
        sh = f" shifted by {self.shift}" if self.shift else ""
        if self.kind in ("complement-of-CD", "A1"):
            return "V^f∖CD" + sh
        if self.kind == "A0":
            if not self.series:
                return "all vertices before 0" + sh
            zs = ", ".join(self.series)
            return f"all vertices before 0 plus {{{zs}}} at 0" + sh
        anc = ", ".join(self.series)
        ex = ", ".join(f"{v.series}_{v.time}" for v in sorted(self.exclude))
        return f"{{Z_t : t ≤ {self.up_to}, Z ∈ {{{anc}}}}} ∖ {{{ex}}}" + sh

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "union":
            out["parts"] = [p.to_json() for p in self.parts]
            return out
        if self.kind in ("complement-of-CD", "A1"):
            out["before"] = {s: to_json(t) for s, t in sorted(self.bounds.items())}
        if self.kind == "A0":
            out["before"] = 0
            out["at_time_0"] = list(self.series)
        if self.kind == "Agamma":
            out["series"] = list(self.series)
            out["up_to"] = self.up_to
        if self.exclude:
            out["exclude"] = [[v.series, v.time] for v in sorted(self.exclude)]
        if self.shift:
            out["shift"] = self.shift
        return out

    def shifted(self, delta):
        if self.kind == "union":
            return AdjustmentSet("union", parts=tuple(p.shifted(delta) for p in self.parts))
        return AdjustmentSet(self.kind, self.bounds, self.series, self.up_to, self.exclude,
                             self.parts, self.shift + delta)


@dataclass(frozen=True)
class IBCVerdict:
    identifiable: bool
    consistency: bool
    query: CausalQuery
    pruned: tuple = ()
    witness: Witness | None = None
    adjustment: AdjustmentSet | None = None
    conditioned: tuple = ()
    parts: tuple = ()

    def to_json(self, with_formula=True):
        out = {
            "identifiable": self.identifiable,
            "assumptions": {"consistency": self.consistency},
            "pruned": [[v.series, v.time] for v in self.pruned],
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.adjustment is not None:
            out["adjustment"] = self.adjustment.to_json()
            if with_formula:
                out["formula"] = emit_formula(self, self.query)
        if self.parts:
            out["effects"] = [p.to_json(with_formula=False) for p in self.parts]
        return out


# ---------------------------------------------------------------- preprocessing


def preprocess(g: SCG, q: CausalQuery):
    """Drop interventions after the effect or with no directed path to it."""
    y = q.effect
    g.check(y.series)
    keep, pruned = [], []
    anc_cache = {}
    for v in q.interventions:
        g.check(v.series)
        if v.series not in anc_cache:
            anc_cache[v.series] = y.series in descendants(g, v.series, strict=True)
        if v.time > y.time or not anc_cache[v.series]:
            pruned.append(v)
        else:
            keep.append(v)
    return q.with_interventions(keep), pruned


# ---------------------------------------------------------------- no-fork test


def _no_fork_witness(g: SCG, q: CausalQuery):
    y = q.effect
    instant = {v.series: v for v in q.interventions if v.time == y.time}
    if not instant:
        return None
    region = set()
    for v in q.interventions:
        region |= descendants(g, v.series)
    prev = {y.series: None}
    todo = deque([y.series])
    while todo:
        u = todo.popleft()
        for w in g.children_of(u):
            if w in prev or w not in region:
                continue
            prev[w] = u
            if w in instant:
                chain = [w]
                while prev[chain[-1]] is not None:
                    chain.append(prev[chain[-1]])
                verts = tuple(TV(s, y.time) for s in chain)
                path = PathF(verts, ("<-",) * (len(verts) - 1))
                return Witness(NO_FORK, instant[w], y, path, "no-fork")
            todo.append(w)
    return None


def directed_no_fork_test(g: SCG, q: CausalQuery):
    """Intervention X^i at the effect time reachable from Y inside the
    union of the interventions' descendants, or None."""
    w = _no_fork_witness(g, q)
    return None if w is None else w.intervention


# ---------------------------------------------------------------- fork tests


def _join(to_x, to_y, rule):
    """Glue F ~> X^i and F ~> Y into X^i <~ W ~> Y, W their last shared vertex."""
    on_y = {v: k for k, v in enumerate(to_y)}
    j = max(k for k, v in enumerate(to_x) if v in on_y)
    w = to_x[j]
    back = list(reversed(to_x[j:]))
    fwd = to_y[on_y[w] + 1:]
    verts = tuple(back + fwd)
    arrows = ("<-",) * (len(back) - 1) + ("->",) * len(fwd)
    kind = NO_FORK if w == to_y[-1] else FORK
    return Witness(kind, to_x[-1], w, PathF(verts, arrows), rule)


def _first_anchor(g, p, candidates, series, time):
    """First intervention (canonical order) whose own profile reaches series_time."""
    for x in sorted(candidates):
        ax = compute_accessibility(g, p, x)
        if time <= ax.ceilings[series]:
            return ax
    raise AssertionError("combined profile disagrees with per-anchor profiles")


def _fork_witness_free(g, q, p, ay=None, skip=None, rule="fork"):
    ay = ay or compute_accessibility(g, p, q.effect)
    am = compute_accessibility_combined(g, p, q)
    for f in g.vertices:
        if f == skip:
            continue
        if fork_exists_free(p, am, ay, f):
            t = p.thresholds[f]
            ax = _first_anchor(g, p, q.interventions, f, t)
            start = TV(f, t)
            return _join(ax.path_to_anchor(start), ay.path_to_anchor(start), rule)
    return None


def fork_test_free(g: SCG, q: CausalQuery, p: NCProfile):
    """First (intervention, fork series) pair of Corollary 1, or None."""
    w = _fork_witness_free(g, q, p)
    if w is None:
        return None
    return w.intervention, _fork_series(w)


def _fork_series(w):
    return w.fork.series


def _instant_reach(g, p, y, tau):
    """BFS from Y over series whose instant tau is in NC; returns parents map."""
    prev = {y: None}
    todo = deque([y])
    while todo:
        u = todo.popleft()
        for w in g.children_of(u):
            if w not in prev and in_nc(p, TV(w, tau)):
                prev[w] = u
                todo.append(w)
    return prev


def _chain(prev, end):
    out = [end]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    return list(reversed(out))


def _fork_witness_consistent(g, q, p):
    y = q.effect
    ay = compute_accessibility(g, p, y)
    # line 1: forks F != Y
    w = _fork_witness_free(g, q, p, ay, skip=y.series, rule="fork")
    if w is not None:
        return w
    tau = p.thresholds[y.series]
    if not is_finite(tau) or tau > ay.ceilings[y.series]:
        return None
    fy = TV(y.series, tau)
    to_y = ay.path_to_anchor(fy)
    # line 2: Y as fork toward an intervention at another time
    others = [x for x in q.interventions if x.time != tau]
    if others:
        a2 = compute_accessibility_combined(g, p, q, anchors=others)
        if tau <= a2.ceilings[y.series]:
            ax = _first_anchor(g, p, others, y.series, tau)
            return _join(ax.path_to_anchor(fy), to_y, "fork-effect-other-time")
    same = {x.series: x for x in q.interventions if x.time == tau}
    if not same:
        return None
    prev = _instant_reach(g, p, y.series, tau)
    # line 3: Y_tau reaches X^i_tau other than through the direct edge
    for s in sorted(same):
        for par in g.parents_of(s):
            if par != y.series and par in prev:
                verts = [TV(v, tau) for v in _chain(prev, par)] + [same[s]]
                return _join(list(reversed(verts)), to_y, "fork-effect-indirect")
    reached = [s for s in sorted(same) if any(par in prev for par in g.parents_of(s))]
    if not reached:
        return None
    # lines 4 and 5: Y_tau -> X^i_tau directly.  Y_tau must still reach
    # Y_0 by a route whose same-time arrows, together with Y -> X^i, form
    # no cycle of series.  Forbidding the same-time X^i -> Y arrow is the
    # necessary part and settles most cases; longer same-time cycles
    # X^i -> ... -> Y are caught by the exact search below.
    rule = "fork-effect-several" if len(reached) >= 2 else "fork-effect-direct"
    for s in reached:
        ay_f = compute_accessibility(g, p, y, forbidden_edge=(s, y.series))
        if tau > ay_f.ceilings[y.series]:
            continue
        route = ay_f.path_to_anchor(fy)
        if not _pattern_acyclic(route, (y.series, s)):
            route = _consistent_route(g, p, fy, y, (y.series, s), ay.ceilings)
        if route is not None:
            return _join([fy, same[s]], route, rule)
    return None


def _same_time_pairs(route):
    return {(a.series, b.series) for a, b in zip(route, route[1:]) if a.time == b.time}


def _pattern_acyclic(route, extra):
    pairs = _same_time_pairs(route) | {extra}
    return _acyclic(pairs)


def _acyclic(pairs):
    ts = TopologicalSorter()
    for a, b in pairs:
        ts.add(b, a)
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def _consistent_route(g, p, start, anchor, extra, ceilings):
    """Directed NC route start ~> anchor whose same-time series pattern
    stays acyclic together with ``extra``; None if there is none.

    Depth-first over (vertex, pattern) states.  Times only range over
    [start.time, anchor.time] and a vertex is kept only if it can still
    reach the anchor at all, so the search stays small in practice, but
    it is exponential in the worst case.  Only the consistency branch
    where the effect is its own fork ends up here.
    """
    seen = set()
    route = [start]

    def rec(v, pattern):
        if v == anchor:
            return True
        for b in g.children_of(v.series):
            hi = anchor.time if b == anchor.series else ceilings[b]
            if not is_finite(hi):
                continue
            lo = v.time + 1 if b == v.series else v.time
            for t in range(min(hi, anchor.time), lo - 1, -1):
                w = TV(b, t)
                if w != anchor and not in_nc(p, w):
                    continue
                if w in route:
                    continue
                npat = pattern
                if t == v.time:
                    pair = (v.series, b)
                    if pair not in pattern:
                        if not _acyclic(pattern | {pair}):
                            continue
                        npat = pattern | {pair}
                if (w, npat) in seen:
                    continue
                seen.add((w, npat))
                route.append(w)
                if rec(w, npat):
                    return True
                route.pop()
        return False

    if rec(start, frozenset([extra])):
        return list(route)
    return None


def fork_test_consistent(g: SCG, q: CausalQuery, p: NCProfile):
    """Witness of the consistency-aware fork conditions, or None."""
    return _fork_witness_consistent(g, q, p)


# ---------------------------------------------------------------- decide


def complement_of_cd(p: NCProfile, kind="complement-of-CD"):
    return AdjustmentSet(kind, bounds=dict(p.thresholds), exclude=frozenset(p.blocked))


def decide(g: SCG, q: CausalQuery, consistency: bool = False) -> IBCVerdict:
    validate_query(g, q)
    if len(q.effects) > 1:
        return _decide_multi(g, q, consistency)
    shift = q.effect.time
    if shift:
        return _shift_back(decide(g, q.shifted(-shift), consistency), q, shift)
    core, pruned = preprocess(g, q)
    pruned = tuple(pruned)
    if not core.interventions:
        return IBCVerdict(True, consistency, q, pruned, None, AdjustmentSet("empty"), ())
    w = _no_fork_witness(g, core)
    p = None
    if w is None:
        p = compute_t_nc(g, core)
        w = _fork_witness_consistent(g, core, p) if consistency else _fork_witness_free(g, core, p)
    if w is not None:
        return IBCVerdict(False, consistency, q, pruned, w, None)
    return IBCVerdict(True, consistency, q, pruned, None, complement_of_cd(p), core.interventions)


def _shift_back(v: IBCVerdict, q, shift):
    def mv(x):
        return TV(x.series, x.time + shift)
    return IBCVerdict(
        v.identifiable, v.consistency, q, tuple(mv(x) for x in v.pruned),
        v.witness.shifted(shift) if v.witness else None,
        v.adjustment.shifted(shift) if v.adjustment else None,
        tuple(mv(x) for x in v.conditioned))


def _decide_multi(g, q, consistency):
    parts = [decide(g, CausalQuery(q.interventions, [y]), consistency) for y in q.effects]
    pruned_all = set.intersection(*(set(p.pruned) for p in parts))
    pruned = tuple(v for v in q.interventions if v in pruned_all)
    bad = next((p for p in parts if not p.identifiable), None)
    if bad is not None:
        return IBCVerdict(False, consistency, q, pruned, bad.witness, None, parts=tuple(parts))
    used = set()
    for p in parts:
        used |= set(p.conditioned)
    adj = [p.adjustment for p in parts if p.adjustment.kind != "empty"]
    if not adj:
        adjustment = AdjustmentSet("empty")
    elif len(adj) == 1:
        adjustment = adj[0]
    else:
        adjustment = AdjustmentSet("union", parts=tuple(adj))
    conditioned = tuple(v for v in q.interventions if v in used)
    return IBCVerdict(True, consistency, q, pruned, None, adjustment, conditioned, tuple(parts))


# ---------------------------------------------------------------- formula


def _sym(v):
    return f"{v.series.lower()}_{v.time}"


def emit_formula(v: IBCVerdict, q: CausalQuery | None = None) -> str:
    """Backdoor adjustment formula with the adjustment set kept symbolic."""
    if not v.identifiable:
        raise NotIdentifiable("no common backdoor set exists")
    q = q or v.query
    ys = ", ".join(_sym(y) for y in sorted(q.effects, key=lambda u: (u.time, u.series)))
    xs = sorted(v.conditioned, key=lambda u: (u.time, u.series))
    if not xs:
        return f"P({ys})"
    cond = ", ".join(_sym(x) for x in xs)
    if v.adjustment is None or v.adjustment.kind == "empty":
        return f"P({ys} | {cond})"
    return f"Σ_z P({ys} | {cond}, z) P(z), z over {v.adjustment.describe()}"
