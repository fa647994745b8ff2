"""NC-accessibility ceilings.

For an anchor V_tv, the ceiling of a series F is the latest t1 such that
F_t1 reaches V_tv by a directed path, in some candidate FTCG, whose
vertices (anchor aside) all lie in NC.  F_t1 is then accessible exactly
when t_NC(F) <= t1 <= ceiling(F) and F_t1 is not an intervention.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .cone import NCProfile, in_nc, release_maps
from .extint import NEG_INF, SeriesValues, is_finite, to_json
from .graph import SCG, TV

COMBINED = "M*"


@dataclass(frozen=True)
class AccessibilityProfile:
    anchor: object
    ceilings: Mapping
    forbidden_edge: tuple | None = None
    seeds: tuple = ()
    _pred: tuple = field(default=(), repr=False, compare=False)

    def ceiling(self, series):
        return self.ceilings[series]

    def to_json(self):
        return {s: to_json(c) for s, c in sorted(self.ceilings.items())}

    def path_to_anchor(self, start):
        """Directed path start -> ... -> seed realizing the ceiling chain.

        ``start`` must be an accessible instant of its series; the first
        arrow is re-timed from the ceiling instant to ``start``.
        """
        names, index, pred_s, pred_t = self._pred
        start = TV(*start)
        seeds = set(self.seeds)
        path = [start]
        cur = index[start.series]
        while True:
            s = int(pred_s[cur])
            if s < 0:
                raise ValueError(f"{start} is not accessible")
            step = TV(names[s], int(pred_t[cur]))
            path.append(step)
            if step in seeds:
                return path
            cur = s


def _run(g, p, seeds, extra_blocked, forbidden_edge):
    n = len(g.vertices)
    par_ptr, par_idx = _kernels.csr(g, "parents")
    instants = list(p.blocked) + [v for v in extra_blocked if v not in p.blocked]
    maps = release_maps(instants)
    blk = {g.index(s): m for s, m in maps.items()}
    blk_ptr, blk_time, _, blk_down = _kernels.blocked_arrays(n, blk)
    if p._arrays is not None and len(p._arrays[0]) == n:
        tnc, fin = p._arrays
    else:
        tnc = np.zeros(n, np.int64)
        fin = np.zeros(n, np.bool_)
        for i, v in enumerate(g.vertices):
            t = p.thresholds[v]
            if is_finite(t):
                tnc[i] = t
                fin[i] = True
    if forbidden_edge is None:
        fp = fc = -1
    else:
        fp, fc = g.index(forbidden_edge[0]), g.index(forbidden_edge[1])
    seed_s = np.asarray([g.index(v.series) for v in seeds], np.int64)
    seed_t = np.asarray([v.time for v in seeds], np.int64)
    ceil, has, pred_s, pred_t = _kernels.access_kernel(
        n, par_ptr, par_idx, tnc, fin, blk_ptr, blk_time, blk_down, seed_s, seed_t, fp, fc)
    ceilings = SeriesValues(g.vertices, g._index, ceil, has, NEG_INF)
    return ceilings, (g.vertices, g._index, pred_s, pred_t)


def compute_accessibility(g: SCG, p: NCProfile, anchor, forbidden_edge=None) -> AccessibilityProfile:
    """Algorithm 2: ceilings toward a single anchor vertex.

    ``forbidden_edge`` = (A, B) removes every same-time realization
    A_t -> B_t from the traversal; lagged realizations stay usable.
    """
    anchor = TV(*anchor)
    g.check(anchor.series)
    if forbidden_edge is not None:
        forbidden_edge = (g.check(forbidden_edge[0]), g.check(forbidden_edge[1]))
    ceilings, pred = _run(g, p, [anchor], [anchor], forbidden_edge)
    return AccessibilityProfile(anchor, ceilings, forbidden_edge, (anchor,), pred)


def compute_accessibility_combined(g: SCG, p: NCProfile, q=None, anchors=None) -> AccessibilityProfile:
    """One traversal seeded by every intervention at once.

    Equivalent to anchoring at a fictitious vertex M* fed by all the
    interventions, so each ceiling is the max over the per-intervention
    profiles.  ``anchors`` restricts the seeds to a subset.
    """
    q = q or p.query
    seeds = tuple(TV(*v) for v in (q.interventions if anchors is None else anchors))
    ceilings, pred = _run(g, p, seeds, [], None)
    return AccessibilityProfile(COMBINED, ceilings, None, seeds, pred)


def is_nc_accessible(p: NCProfile, a: AccessibilityProfile, f) -> bool:
    f = TV(*f)
    if f in a.seeds:
        return False
    return in_nc(p, f) and f.time <= a.ceilings[f.series]


def fork_exists_free(p: NCProfile, a_x: AccessibilityProfile, a_y: AccessibilityProfile, f) -> bool:
    """Corollary-1 test: F at its first NC instant is accessible from both sides."""
    t = p.thresholds[f]
    if not is_finite(t):
        return False
    return t <= a_x.ceilings[f] and t <= a_y.ceilings[f]
