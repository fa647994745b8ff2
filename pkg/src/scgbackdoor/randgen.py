"""Seeded random SCGs and queries.

Everything is drawn from one ``random.Random`` so a seed pins the whole
corpus.  Series are named S0, S1, ...; every ordered pair of distinct
series gets an edge with probability ``p`` and every series a self-loop
with probability ``p_self`` (``p`` when not given).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cone import CausalQuery
from .graph import SCG, TV


@dataclass(frozen=True)
class Instance:
    name: str
    scg: SCG
    query: CausalQuery


def random_scg(rng: random.Random, n_series: int, p: float, p_self: float | None = None) -> SCG:
    p_self = p if p_self is None else p_self
    names = [f"S{i}" for i in range(n_series)]
    edges = []
    for a in names:
        for b in names:
            q = p_self if a == b else p
            if rng.random() < q:
                edges.append((a, b))
    return SCG(names, edges)


def random_query(rng: random.Random, g: SCG, max_interventions=3, max_gamma=2) -> CausalQuery:
    """Effect at time 0, 1..max_interventions distinct interventions at -gamma."""
    y = rng.choice(g.vertices)
    pool = [TV(s, -k) for s in g.vertices for k in range(max_gamma + 1)]
    pool.remove(TV(y, 0))
    k = rng.randint(1, min(max_interventions, len(pool)))
    return CausalQuery(sorted(rng.sample(pool, k)), [TV(y, 0)])


def corpus(seed=1, count=200, max_series=5, p=0.3, p_self=None, max_interventions=3,
           max_gamma=2, min_series=2):
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(min_series, max_series)
        g = random_scg(rng, n, p, p_self)
        q = random_query(rng, g, max_interventions, max_gamma)
        out.append(Instance(f"case{k:04d}", g, q))
    return out
