import pytest
from hypothesis import given, settings

from scgbackdoor import oracle
from scgbackdoor.cone import (CausalQuery, compute_t_nc, in_cd, in_nc,
                              intervention_release_times, release_maps, validate_query)
from scgbackdoor.errors import OverlapError, UnknownVertex
from scgbackdoor.extint import INF, is_finite
from scgbackdoor.graph import SCG, TV, descendants
from strategies import instances, window_vertices


def _release(*times):
    q = CausalQuery([("X", t) for t in times], [("Y", 0)])
    return {v.time: r for v, r in intervention_release_times(q).items()}


def test_release_single():
    assert _release(-2) == {-2: -1}


def test_release_consecutive_block():
    assert _release(-2, -1) == {-2: 0, -1: 0}


def test_release_gap_breaks_chain():
    assert _release(-3, -1) == {-3: -2, -1: 0}


def test_release_maps_both_directions():
    # (first free instant after, last free instant before)
    assert release_maps([("X", -3), ("X", -2), ("X", 0)])["X"] == {-3: (-1, -4), -2: (-1, -4), 0: (1, -1)}


def test_thermo_thresholds(thermo_g, thermo_q):
    # frozen: matches the oracle's descendant enumeration (see the oracle test below)
    p = compute_t_nc(thermo_g, thermo_q)
    assert p.thresholds == {"L": 0, "K": 0, "B": -1, "O": -1, "Outside": INF}


def test_thermo_thresholds_agree_with_oracle(thermo_g, thermo_q):
    p = compute_t_nc(thermo_g, thermo_q)
    spec = oracle.default_spec(thermo_g, thermo_q)
    cd = oracle.oracle_cd(spec, thermo_q)
    assert cd == {TV(s, t) for s in "BKLO" for t in (-1, 0)}
    for v in window_vertices(thermo_g, spec.window):
        assert in_cd(p, v) == (v in cd)


def test_single_edge_without_self_loop():
    # X_0 is not a descendant of X_-1 without a self-loop, so X never enters NC
    g = SCG(["X", "Y"], [("X", "Y")])
    p = compute_t_nc(g, CausalQuery([("X", -1)], [("Y", 0)]))
    assert p.thresholds == {"X": INF, "Y": -1}


def test_single_edge_with_self_loop():
    g = SCG(["X", "Y"], [("X", "Y"), ("X", "X")])
    p = compute_t_nc(g, CausalQuery([("X", -1)], [("Y", 0)]))
    assert p.thresholds == {"X": 0, "Y": -1}


def test_no_descendants_everything_infinite():
    g = SCG(["X", "Y", "Z"], [("Y", "Z")])
    p = compute_t_nc(g, CausalQuery([("X", -1)], [("Y", 0)]))
    assert all(t == INF for t in p.thresholds.values())


def test_membership(thermo_g, thermo_q):
    p = compute_t_nc(thermo_g, thermo_q)
    for iv in thermo_q.interventions:
        assert in_cd(p, iv) and not in_nc(p, iv)
    assert not in_cd(p, ("Outside", 0))
    assert in_nc(p, ("B", -1))
    assert not in_nc(p, ("B", -2))
    assert in_nc(p, ("L", 0))
    with pytest.raises(UnknownVertex):
        in_cd(p, ("nope", 0))
    with pytest.raises(UnknownVertex):
        in_nc(p, ("nope", 0))


def test_unknown_series(thermo_g):
    with pytest.raises(UnknownVertex):
        compute_t_nc(thermo_g, CausalQuery([("nope", -1)], [("O", 0)]))


def test_query_validation(thermo_g):
    with pytest.raises(OverlapError):
        validate_query(thermo_g, CausalQuery([("K", -1), ("K", -1)], [("O", 0)]))
    with pytest.raises(OverlapError):
        validate_query(thermo_g, CausalQuery([("O", 0)], [("O", 0)]))
    with pytest.raises(OverlapError):
        validate_query(thermo_g, CausalQuery([("K", -1)], []))


def test_visit_counts(thermo_g, thermo_q2):
    p = compute_t_nc(thermo_g, thermo_q2)
    # L carries two interventions: one touch per root plus one assignment
    assert p.visits == {"B": 1, "K": 2, "L": 3, "O": 1}


@settings(max_examples=150, deadline=None)
@given(instances())
def test_cd_matches_oracle(inst):
    g, q = inst
    p = compute_t_nc(g, q)
    for consistency in (False, True):
        spec = oracle.default_spec(g, q, consistency)
        cd = oracle.oracle_cd(spec, q)
        for v in window_vertices(g, spec.window):
            assert in_cd(p, v) == (v in cd), (v, consistency)


@settings(max_examples=150, deadline=None)
@given(instances(max_series=6, max_interventions=4, max_gamma=3))
def test_profile_invariants(inst):
    g, q = inst
    p = compute_t_nc(g, q)
    ivs = set(q.interventions)
    for s in g.vertices:
        t = p.thresholds[s]
        if is_finite(t):
            # NC is upward closed in time apart from interventions
            for t2 in range(t, t + 4):
                assert in_nc(p, (s, t2)) == (TV(s, t2) not in ivs)
            assert not in_nc(p, (s, t - 1))
    # strict descendants of an intervention series all get a finite threshold
    for iv in q.interventions:
        for d in descendants(g, iv.series, strict=True):
            assert is_finite(p.thresholds[d])
    # each series is assigned once; an intervention series is also touched once per root
    roots = {}
    for iv in q.interventions:
        roots[iv.series] = roots.get(iv.series, 0) + 1
    for s, c in p.visits.items():
        assert c <= 1 + roots.get(s, 0)
