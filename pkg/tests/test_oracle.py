import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scgbackdoor import oracle
from scgbackdoor.cone import CausalQuery
from scgbackdoor.errors import BudgetExceeded, OutOfWindow, OverlapError
from scgbackdoor.graph import FTCG, SCG, TV, PathF, is_acyclic, mutilate
from scgbackdoor.oracle import (EXACT, EnumSpec, backdoor_criterion, count_raw_candidates,
                                d_separated, embed_witness, enumerate_candidates, reduce,
                                witness_search)
from strategies import instances


def _e(a, ta, b, tb):
    return (TV(a, ta), TV(b, tb))


# the three FTCGs over [-2, 0] that all reduce to the Z <-> X -> Y SCG
FTCG_1 = [_e("X", -1, "Y", 0), _e("X", -2, "Y", -1), _e("X", 0, "Y", 0), _e("X", -1, "Y", -1),
          _e("X", -2, "Y", -2), _e("X", -2, "X", -1), _e("X", -1, "X", 0), _e("Z", -2, "Z", -1),
          _e("Z", -1, "Z", 0), _e("Z", -2, "X", -1), _e("Z", -1, "X", 0), _e("X", -2, "Z", -1),
          _e("X", -1, "Z", 0), _e("Z", -2, "X", -2), _e("Z", -1, "X", -1), _e("Z", 0, "X", 0)]
FTCG_2 = [_e("X", -1, "Y", 0), _e("X", -2, "Y", -1), _e("X", -2, "Y", -2), _e("Z", -2, "X", -1),
          _e("Z", -1, "X", 0), _e("X", -1, "Z", 0), _e("X", -1, "Z", -1), _e("X", -2, "X", -1),
          _e("X", -1, "X", 0), _e("Z", -2, "Z", -1), _e("Z", -1, "Z", 0)]
FTCG_3 = [_e("X", -1, "Y", 0), _e("X", -2, "Y", -1), _e("Z", -2, "X", 0), _e("X", -2, "Z", -2),
          _e("X", -1, "Z", -1), _e("X", 0, "Z", 0), _e("X", -2, "X", -1), _e("X", -1, "X", 0),
          _e("Z", -2, "Z", -1), _e("Z", -1, "Z", 0)]


@pytest.mark.parametrize("edges", [FTCG_1, FTCG_2, FTCG_3])
def test_reduce_example_ftcgs(edges, fig2_g):
    assert reduce(FTCG(["X", "Y", "Z"], (-2, 0), edges)) == fig2_g


def test_reduce_trivial():
    assert reduce(FTCG(["X", "Y"], (-1, 0), [])) == SCG(["X", "Y"])
    f = FTCG(["X"], (-1, 0), [_e("X", -1, "X", 0)])
    assert reduce(f) == SCG(["X"], [("X", "X")])


# ---------------------------------------------------------------- enumeration


XY = SCG(["X", "Y"], [("X", "Y")])


def test_enumeration_counts():
    exact = EnumSpec(XY, (0, 0), 0, relaxation=EXACT)
    got = list(enumerate_candidates(exact))
    assert len(got) == 1 and got[0].edges == {_e("X", 0, "Y", 0)}
    assert len(list(enumerate_candidates(EnumSpec(XY, (-1, 0), 1)))) == 8
    assert len(list(enumerate_candidates(EnumSpec(XY, (-1, 0), 1, consistency=True)))) == 4


def test_enumeration_is_deterministic_and_distinct():
    spec = EnumSpec(SCG(["X", "Y"], [("X", "Y"), ("Y", "X"), ("X", "X")]), (-1, 0), 1)
    a = [f.edges for f in enumerate_candidates(spec)]
    b = [f.edges for f in enumerate_candidates(spec)]
    assert a == b
    assert len(set(a)) == len(a)
    assert all(is_acyclic(e) for e in a)


def test_enumeration_budget():
    spec = EnumSpec(XY, (-3, 0), 2)
    assert count_raw_candidates(spec) == 2 ** 9
    with pytest.raises(BudgetExceeded):
        list(enumerate_candidates(spec, budget=100))


def test_spec_validation():
    with pytest.raises(ValueError):
        EnumSpec(SCG(["X"], [("X", "X")]), (-1, 0), 0)
    with pytest.raises(ValueError):
        EnumSpec(XY, (0, 0), 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.booleans(), min_size=n * n, max_size=n * n))), st.booleans())
def test_candidates_reduce_into_the_scg(shape, consistency):
    n, bits = shape
    names = [f"S{i}" for i in range(n)]
    g = SCG(names, [e for e, b in zip(itertools.product(names, names), bits) if b])
    spec = EnumSpec(g, (-1, 0), 1, consistency)
    if count_raw_candidates(spec) > 2 ** 12:
        return
    for f in enumerate_candidates(spec):
        assert reduce(f).edges <= g.edges
    if len(g.edges) <= 3:
        full = EnumSpec(g, (-1, 0), 1, consistency, EXACT)
        for f in enumerate_candidates(full):
            assert reduce(f) == g


# ---------------------------------------------------------------- d-separation


def _f(*edges, window=(-1, 0)):
    series = sorted({v.series for e in edges for v in e})
    return FTCG(series, window, edges)


A, B, C, F = TV("A", 0), TV("B", 0), TV("C", 0), TV("F", -1)


def test_dsep_chain():
    f = _f((A, B), (B, C))
    assert not d_separated(f, A, C, set())
    assert d_separated(f, A, C, {B})


def test_dsep_collider():
    f = _f((A, B), (C, B))
    assert d_separated(f, A, C, set())
    assert not d_separated(f, A, C, {B})


def test_dsep_fork():
    f = _f((F, A), (F, B))
    assert d_separated(f, A, B, {F})
    assert not d_separated(f, A, B, set())


def test_dsep_out_of_window():
    with pytest.raises(OutOfWindow):
        d_separated(_f((A, B)), A, TV("B", -5), set())


def _random_ftcg(rng, n=4, window=(-1, 0), p=0.35):
    names = [f"S{i}" for i in range(n)]
    verts = [TV(s, t) for t in range(window[0], window[1] + 1) for s in names]
    edges = [(u, w) for i, u in enumerate(verts) for w in verts[i + 1:]
             if u.time <= w.time and (u.time < w.time or u.series != w.series) and rng.random() < p]
    return FTCG(names, window, edges)


@pytest.mark.parametrize("seed", range(40))
def test_dsep_against_path_blocking(seed):
    rng = random.Random(seed)
    f = _random_ftcg(rng)
    verts = sorted(f.vertices)
    a, b = rng.sample(verts, 2)
    rest = [v for v in verts if v not in (a, b)]
    z = set(rng.sample(rest, rng.randint(0, 3)))
    expect = all(oracle.path_blocked(f, p, z) for p in oracle.all_paths(f, a, b))
    assert d_separated(f, a, b, z) == expect
    assert d_separated(f, b, a, z) == expect


# ---------------------------------------------------------------- backdoor criterion


def test_backdoor_no_backdoor_paths():
    f = _f((TV("X", 0), TV("Y", 0)))
    assert backdoor_criterion(f, [TV("X", 0)], [TV("Y", 0)], set())


def test_backdoor_fork_confounder():
    x, y, fk = TV("X", 0), TV("Y", 0), TV("F", -1)
    f = _f((fk, x), (fk, y), (x, y))
    assert backdoor_criterion(f, [x], [y], {fk})
    assert not backdoor_criterion(f, [x], [y], set())


def test_backdoor_descendant_in_z():
    x, y, m = TV("X", 0), TV("Y", 0), TV("M", 0)
    f = _f((x, m), (m, y))
    assert not backdoor_criterion(f, [x], [y], {m})


def test_backdoor_overlap():
    x, y = TV("X", 0), TV("Y", 0)
    f = _f((x, y))
    with pytest.raises(OverlapError):
        backdoor_criterion(f, [x], [y], {x})


@pytest.mark.parametrize("seed", range(40))
def test_backdoor_decomposes_over_effects(seed):
    rng = random.Random(100 + seed)
    f = _random_ftcg(rng, n=4)
    verts = sorted(f.vertices)
    xs = rng.sample(verts, 2)
    ys = rng.sample([v for v in verts if v not in xs], 2)
    rest = [v for v in verts if v not in xs and v not in ys]
    z = set(rng.sample(rest, rng.randint(0, 2)))
    whole = backdoor_criterion(f, xs, ys, z)
    assert whole == all(backdoor_criterion(f, xs, [y], z) for y in ys)


# ---------------------------------------------------------------- witness search


def test_thermo_witness(thermo_g, thermo_q):
    spec = oracle.default_spec(thermo_g, thermo_q)
    v = witness_search(spec, thermo_q)
    assert v.exists_witness and v.ftcg is not None
    known = PathF((TV("L", -1), TV("B", -1), TV("L", 0), TV("O", 0)), ("<-", "->", "->"))
    cd = oracle.oracle_cd(spec, thermo_q)
    assert embed_witness(spec, thermo_q, known, cd.__contains__) is not None
    assert embed_witness(spec, thermo_q, v.witness, cd.__contains__) is not None


@pytest.mark.parametrize("window,max_lag", [((-3, 0), 1), ((-3, 0), 2), ((-2, 0), 2)])
def test_thermo_with_current_intervention_has_no_witness(thermo_g, thermo_q2, window, max_lag):
    for consistency in (False, True):
        spec = EnumSpec(thermo_g, window, max_lag, consistency)
        assert not witness_search(spec, thermo_q2).exists_witness


def test_chain_with_self_loops_has_no_witness():
    g = SCG(["X", "Y"], [("X", "Y"), ("X", "X"), ("Y", "Y")])
    q = CausalQuery([("X", -2)], [("Y", 0)])
    for consistency in (False, True):
        spec = EnumSpec(g, (-3, 0), 2, consistency)
        assert not witness_search(spec, q, engine="paths").exists_witness
    small = EnumSpec(g, (-2, 0), 2, True)
    assert not witness_search(small, q, engine="enumerate").exists_witness


def test_witness_is_valid_in_its_ftcg(thermo_g, thermo_q):
    spec = oracle.default_spec(thermo_g, thermo_q)
    v = witness_search(spec, thermo_q)
    w = v.witness
    assert w.is_simple() and w.is_backdoor() and w.is_collider_free()
    assert set(w.edges()) <= set(v.ftcg.edges)


@settings(max_examples=60, deadline=None)
@given(instances(min_series=2, max_series=3, max_interventions=2, max_gamma=1), st.booleans())
def test_engines_agree(inst, consistency):
    g, q = inst
    window, lag = (-1, 0), 1
    spec = EnumSpec(g, window, lag, consistency)
    if count_raw_candidates(spec) > 2 ** 14:
        return
    assert oracle.oracle_cd(spec, q, engine="paths") == oracle.oracle_cd(spec, q, engine="enumerate")
    cd = oracle.oracle_cd(spec, q)
    a = witness_search(spec, q, cd.__contains__, engine="paths")
    b = witness_search(spec, q, cd.__contains__, engine="enumerate")
    assert a.exists_witness == b.exists_witness
    for v in (a, b):
        if v.exists_witness:
            assert embed_witness(spec, q, v.witness, cd.__contains__) is not None


@settings(max_examples=60, deadline=None)
@given(instances(min_series=2, max_series=3, max_interventions=2, max_gamma=1), st.booleans())
def test_unrestricted_region_matches_path_enumeration(inst, consistency):
    # region = everything: witness iff some candidate's mutilation has a
    # collider-free backdoor path, checked with the plain path enumerator
    g, q = inst
    spec = EnumSpec(g, (-1, 0), 1, consistency)
    if count_raw_candidates(spec) > 2 ** 12:
        return
    got = witness_search(spec, q, lambda v: True, engine="paths").exists_witness
    ivs = list(q.interventions)
    y = q.effect
    expect = False
    for f in enumerate_candidates(spec):
        for x in ivs:
            others = [v for v in ivs if v != x]
            cut = mutilate(f, others, others)
            for p in oracle.all_paths(cut, x, y):
                if p.is_backdoor() and p.is_collider_free() and not set(p.vertices) & set(others):
                    expect = True
                    break
            if expect:
                break
        if expect:
            break
    assert got == expect


def test_budget_is_enforced(thermo_g, thermo_q):
    spec = oracle.default_spec(thermo_g, thermo_q)
    with pytest.raises(BudgetExceeded):
        witness_search(spec, thermo_q, budget=5)
    with pytest.raises(BudgetExceeded):
        witness_search(spec, thermo_q, engine="enumerate")


def test_default_window():
    q = CausalQuery([("X", -2), ("Z", -1)], [("Y", 0)])
    assert oracle.default_window(q) == ((-4, 0), 3)
