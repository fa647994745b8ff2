"""Closed-form conditions for one intervention and one effect.

``monovariate_decide(g, x, y, gamma)`` answers P(y_0 | do(x_{-gamma})) from
the SCG alone: a path condition inside Desc(X) at gamma = 0, a local shape
test at gamma = 1 (only under consistency) and "no directed cycle of two
or more vertices through X" otherwise.  ``cross_check_monovariate``
compares it with the general decision procedure on every small SCG.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .cone import CausalQuery, compute_t_nc
from .decider import AdjustmentSet, IBCVerdict, complement_of_cd, decide
from .errors import BudgetExceeded, NotAncestor
from .graph import SCG, TV, ancestors, descendants, has_big_cycle, induced_subgraph
from .oracle import default_budget

FIRST = "first"
FULL = "full"


def _reverse_reach(g, seeds, inside):
    out = {s for s in seeds if s in inside}
    todo = deque(out)
    while todo:
        v = todo.popleft()
        for p in g.parents_of(v):
            if p in inside and p not in out:
                out.add(p)
                todo.append(p)
    return out


def has_collider_free_backdoor(g: SCG, x, y, inside) -> bool:
    """Collider-free backdoor path x <- ... <- F -> ... -> y using only
    vertices of ``inside`` (F may be y itself).

    Two directed paths out of a common F, one into x and one into y, can
    always be cut at their last shared vertex, so it is enough that some
    vertex reaches a parent of x and also reaches y, both without going
    through x.
    """
    rest = set(inside) - {x}
    to_x = _reverse_reach(g, [p for p in g.parents_of(x) if p != x], rest)
    to_y = _reverse_reach(g, [y], rest)
    return bool(to_x & to_y)


def backdoor_first_outside(g: SCG, x, y, region, variant=FIRST, budget=None):
    """Series met on SCG backdoor paths x <- V1 ... y outside ``region``.

    With variant FIRST only the first such series of each path is kept;
    FULL keeps every one.  Paths ignore orientation after the first arrow
    and are simple.  The search enumerates path prefixes, so it is bounded
    by ``budget`` steps.
    """
    budget = default_budget() if budget is None else budget
    steps = 0
    nbrs = {v: sorted(set(g.parents_of(v)) | set(g.children_of(v))) for v in g.vertices}
    found = set()
    path = [x]
    on = {x}

    def ends_at_y(start, blocked):
        # simple continuation start ... y avoiding blocked
        if start == y:
            return True
        seen = {start}
        todo = deque([start])
        while todo:
            v = todo.popleft()
            for w in nbrs[v]:
                if w == y:
                    return True
                if w not in seen and w not in blocked:
                    seen.add(w)
                    todo.append(w)
        return False

    def full_rec(v, outside_seen):
        # every simple path to y; collect outside-region vertices on it
        nonlocal steps
        steps += 1
        if steps > budget:
            raise BudgetExceeded(budget, "path prefixes")
        if v == y:
            found.update(outside_seen)
            return
        for w in nbrs[v]:
            if w in on:
                continue
            on.add(w)
            path.append(w)
            full_rec(w, outside_seen + ([w] if w not in region else []))
            path.pop()
            on.discard(w)

    def first_rec(v):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise BudgetExceeded(budget, "path prefixes")
        for w in nbrs[v]:
            if w in on:
                continue
            if len(path) == 1 and w not in g.parents_of(x):
                continue
            if w not in region:
                if w not in found and ends_at_y(w, on):
                    found.add(w)
                continue
            if w == y:
                continue
            on.add(w)
            path.append(w)
            first_rec(w)
            path.pop()
            on.discard(w)

    if variant == FULL:
        for w in g.parents_of(x):
            if w == x:
                continue
            on.add(w)
            path.append(w)
            full_rec(w, [w] if w not in region else [])
            path.pop()
            on.discard(w)
    else:
        first_rec(x)
    return found


def _gamma1_shape(g, x, y, desc):
    pa_x = set(g.parents_of(x))
    if not (pa_x & desc) - {x}:
        return True
    keep = desc & (pa_x | set(g.parents_of(y)))
    sub = induced_subgraph(g, keep)
    two = {(x, y), (y, x)}
    return set(sub.vertices) == {x, y} and sub.edges in (two, two | {(x, x)})


def monovariate_condition(g: SCG, x, y, gamma, consistency=True) -> bool:
    """True when P(y_0 | do(x_{-gamma})) is identifiable by common backdoor."""
    g.check(x)
    g.check(y)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    desc = descendants(g, x)
    if y not in descendants(g, x, strict=True):
        raise NotAncestor(x, y)
    if gamma == 0:
        return not has_collider_free_backdoor(g, x, y, desc)
    if gamma == 1 and consistency:
        return _gamma1_shape(g, x, y, desc)
    return not has_big_cycle(g, x)


def monovariate_adjustment(g: SCG, x, y, gamma, consistency=True, variant=FIRST, budget=None):
    if gamma == 0:
        desc = descendants(g, x)
        zs = backdoor_first_outside(g, x, y, desc, variant, budget)
        return AdjustmentSet("A0", series=tuple(sorted(zs)))
    if gamma == 1 and consistency:
        q = CausalQuery([(x, -1)], [(y, 0)])
        return complement_of_cd(compute_t_nc(g, q), kind="A1")
    anc = tuple(sorted(ancestors(g, x)))
    return AdjustmentSet("Agamma", series=anc, up_to=-gamma, exclude=frozenset([TV(x, -gamma)]))


def monovariate_decide(g: SCG, x, y, gamma: int, consistency: bool = True,
                       variant=FIRST, budget=None) -> IBCVerdict:
    """Verdict for P(y_0 | do(x_{-gamma})) by the closed forms.

    The witness of a non-identifiable effect comes from the general
    procedure, the closed forms only say that one exists.
    """
    q = CausalQuery([(x, -gamma)], [(y, 0)])
    if monovariate_condition(g, x, y, gamma, consistency):
        adj = monovariate_adjustment(g, x, y, gamma, consistency, variant, budget)
        return IBCVerdict(True, consistency, q, (), None, adj, q.interventions)
    general = decide(g, q, consistency)
    return IBCVerdict(False, consistency, q, (), general.witness, None)


# ---------------------------------------------------------------- cross check


@dataclass
class CrossCheckReport:
    checked: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.disagreements

    def to_json(self):
        return {"checked": self.checked, "disagreements": [
            {"edges": sorted(g.edges), "x": x, "y": y, "gamma": k, "consistency": c,
             "closed_form": a, "general": b}
            for g, x, y, k, c, a, b in self.disagreements]}


def all_scgs(n):
    """Every SCG on n vertices named V0..V{n-1}, self-loops included."""
    names = [f"V{i}" for i in range(n)]
    pairs = [(a, b) for a in names for b in names]
    for mask in product((False, True), repeat=len(pairs)):
        yield SCG(names, [e for e, on in zip(pairs, mask) if on])


def cross_check_monovariate(bounds=(2, 3), gammas=(0, 1, 2, 3), regimes=(False, True),
                            graphs=None) -> CrossCheckReport:
    """Closed forms against ``decide`` for every SCG with the given vertex
    counts, every ordered pair (x, y) with x an ancestor of y, every gamma
    and regime.  x == y is included for gamma >= 1 (at gamma = 0 the
    intervention would be the effect itself)."""
    report = CrossCheckReport()
    if graphs is None:
        graphs = (g for n in bounds for g in all_scgs(n))
    for g in graphs:
        for x in g.vertices:
            desc = descendants(g, x, strict=True)
            for y in g.vertices:
                if y not in desc:
                    continue
                for k in gammas:
                    if k == 0 and x == y:
                        continue
                    q = CausalQuery([(x, -k)], [(y, 0)])
                    for c in regimes:
                        a = monovariate_condition(g, x, y, k, c)
                        b = decide(g, q, c).identifiable
                        report.checked += 1
                        if a != b:
                            report.disagreements.append((g, x, y, k, c, a, b))
    return report
