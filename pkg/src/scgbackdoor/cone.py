"""Queries, the cone of descendants CD and the non-conditionable set NC.

CD is never materialized.  It is described by one threshold per series:
S_t is in NC iff t >= t_NC(S) and S_t is not an intervention, and
CD = NC plus the interventions.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import OverlapError, UnknownVertex
from .extint import INF, SeriesValues, to_json
from .graph import SCG, TV


@dataclass(frozen=True)
class CausalQuery:
    """do(X^i at time -gamma_i) for each intervention, effects Y^j at times t_j."""

    interventions: tuple
    effects: tuple

    def __init__(self, interventions, effects):
        if isinstance(effects, tuple) and len(effects) == 2 and isinstance(effects[0], str):
            effects = [effects]
        object.__setattr__(self, "interventions", tuple(TV(s, int(t)) for s, t in interventions))
        object.__setattr__(self, "effects", tuple(TV(s, int(t)) for s, t in effects))

    @property
    def effect(self) -> TV:
        if len(self.effects) != 1:
            raise ValueError("query has several effects")
        return self.effects[0]

    def gamma(self, iv) -> int:
        return self.effect.time - iv.time

    def with_interventions(self, interventions):
        return CausalQuery(interventions, self.effects)

    def shifted(self, delta):
        return CausalQuery([(s, t + delta) for s, t in self.interventions],
                           [(s, t + delta) for s, t in self.effects])

    def to_json(self):
        return {"interventions": [[s, t] for s, t in self.interventions],
                "effects": [[s, t] for s, t in self.effects]}

    def __str__(self):
        dos = ", ".join(f"do({s}@{t})" for s, t in self.interventions)
        effs = ", ".join(f"{s}@{t}" for s, t in self.effects)
        return f"{effs} | {dos}" if dos else effs


def validate_query(g: SCG, q: CausalQuery) -> None:
    if not q.effects:
        raise OverlapError("a query needs at least one effect")
    for v in q.interventions + q.effects:
        g.check(v.series)
    if len(set(q.interventions)) != len(q.interventions):
        raise OverlapError("duplicate intervention")
    if len(set(q.effects)) != len(q.effects):
        raise OverlapError("duplicate effect")
    clash = set(q.interventions) & set(q.effects)
    if clash:
        raise OverlapError(f"{min(clash)} is both an intervention and an effect")


def _group_times(instants):
    by_series = {}
    for s, t in instants:
        by_series.setdefault(s, []).append(t)
    return {s: sorted(ts) for s, ts in by_series.items()}


def _release_up(times):
    # times sorted ascending; consecutive blocks share the instant after the block
    out = {}
    nxt = None
    for t in reversed(times):
        out[t] = out[t + 1] if nxt == t + 1 else t + 1
        nxt = t
    return out


def _release_down(times):
    out = {}
    prev = None
    for t in times:
        out[t] = out[t - 1] if prev == t - 1 else t - 1
        prev = t
    return out


def release_maps(instants):
    """{series: {time: (first free instant after, last free instant before)}}."""
    out = {}
    for s, times in _group_times(instants).items():
        up, down = _release_up(times), _release_down(times)
        out[s] = {t: (up[t], down[t]) for t in times}
    return out


def intervention_release_times(q: CausalQuery) -> dict:
    """Smallest t1 >= time of each intervention that is not itself intervened on."""
    maps = release_maps(q.interventions)
    return {iv: maps[iv.series][iv.time][0] for iv in q.interventions}


@dataclass(frozen=True)
class NCProfile:
    thresholds: Mapping
    query: CausalQuery
    blocked: frozenset = field(repr=False)
    # (series names, per-series visit counts of the t_NC traversal)
    _visits: tuple = field(repr=False, compare=False, default=None)
    # (t_NC, finite mask) as int64/bool arrays in vertex order
    _arrays: tuple = field(repr=False, compare=False, default=None)

    @property
    def visits(self):
        """{series: times the t_NC traversal touched it}, zero counts left out."""
        if self._visits is None:
            return None
        names, counts = self._visits
        return {names[i]: int(c) for i, c in enumerate(counts) if c}

    def threshold(self, series):
        return self.thresholds[series]

    def to_json(self):
        return {s: to_json(t) for s, t in sorted(self.thresholds.items())}


def intervention_order(q: CausalQuery):
    """Decreasing gamma (increasing time), ties by series name."""
    return sorted(q.interventions, key=lambda v: (v.time, v.series))


def compute_t_nc(g: SCG, q: CausalQuery) -> NCProfile:
    for v in q.interventions:
        g.check(v.series)
    n = len(g.vertices)
    ch_ptr, ch_idx = _kernels.csr(g, "children")
    order = intervention_order(q)
    roots_s = np.asarray([g.index(v.series) for v in order], np.int64)
    roots_t = np.asarray([v.time for v in order], np.int64)
    maps = release_maps(q.interventions)
    blk = {g.index(s): m for s, m in maps.items()}
    blk_ptr, blk_time, blk_up, _ = _kernels.blocked_arrays(n, blk)
    tnc, seen, visits = _kernels.t_nc_kernel(n, ch_ptr, ch_idx, roots_s, roots_t,
                                              blk_ptr, blk_time, blk_up)
    thresholds = SeriesValues(g.vertices, g._index, tnc, seen, INF)
    return NCProfile(thresholds, q, frozenset(q.interventions), (g.vertices, visits), (tnc, seen))


def _known(p, v):
    v = TV(*v)
    if v.series not in p.thresholds:
        raise UnknownVertex(v.series)
    return v


def in_cd(p: NCProfile, v) -> bool:
    v = _known(p, v)
    return v in p.blocked or v.time >= p.thresholds[v.series]


def in_nc(p: NCProfile, v) -> bool:
    v = _known(p, v)
    return v not in p.blocked and v.time >= p.thresholds[v.series]
