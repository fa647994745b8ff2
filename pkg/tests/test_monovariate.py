import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scgbackdoor import oracle
from scgbackdoor.agreement import oracle_check
from scgbackdoor.cone import CausalQuery
from scgbackdoor.decider import decide
from scgbackdoor.errors import BudgetExceeded, NotAncestor, UnknownVertex
from scgbackdoor.graph import SCG, TV, descendants
from scgbackdoor.monovariate import (FULL, all_scgs, backdoor_first_outside,
                                     cross_check_monovariate, has_collider_free_backdoor,
                                     monovariate_condition, monovariate_decide)
from strategies import scgs

CHAIN = SCG(["X", "Y"], [("X", "Y"), ("X", "X"), ("Y", "Y")])


def test_fig2_gamma0_identifiable_with_a0(fig2_g):
    desc = descendants(fig2_g, "X")
    assert desc == {"X", "Y", "Z"}
    assert not has_collider_free_backdoor(fig2_g, "X", "Y", desc)
    v = monovariate_decide(fig2_g, "X", "Y", 0)
    assert v.identifiable and v.adjustment.kind == "A0"
    assert v.adjustment.contains(("Z", -1)) and not v.adjustment.contains(("Z", 0))


@pytest.mark.parametrize("gamma", [1, 2, 3])
@pytest.mark.parametrize("consistency", [False, True])
def test_fig2_cycle_blocks_lagged_effects(fig2_g, gamma, consistency):
    v = monovariate_decide(fig2_g, "X", "Y", gamma, consistency)
    assert not v.identifiable
    assert v.witness is not None and v.witness.intervention == TV("X", -gamma)


@pytest.mark.parametrize("gamma", [0, 1, 2])
def test_fig2_agrees_with_oracle(fig2_g, gamma):
    res = oracle_check(fig2_g, CausalQuery([("X", -gamma)], [("Y", 0)]), consistency=True)
    assert res.agree


def test_chain_gamma2_adjustment():
    v = monovariate_decide(CHAIN, "X", "Y", 2)
    assert v.identifiable
    adj = v.adjustment
    assert adj.kind == "Agamma" and adj.series == ("X",) and adj.up_to == -2
    assert adj.materialize(["X", "Y"], (-4, 0)) == {TV("X", -4), TV("X", -3)}
    q = CausalQuery([("X", -2)], [("Y", 0)])
    for lag, consistency in ((1, False), (2, True)):
        spec = oracle.EnumSpec(CHAIN, (-3, 0), lag, consistency)
        z = adj.materialize(CHAIN.vertices, spec.window)
        for f in oracle.enumerate_candidates(spec):
            assert oracle.backdoor_criterion(f, q.interventions, q.effects, z)


def test_gamma1_shapes():
    two = SCG(["X", "Y"], [("X", "Y"), ("Y", "X")])
    looped = SCG(["X", "Y"], [("X", "Y"), ("Y", "X"), ("X", "X")])
    y_looped = SCG(["X", "Y"], [("X", "Y"), ("Y", "X"), ("Y", "Y")])
    assert monovariate_condition(two, "X", "Y", 1, True)
    assert monovariate_condition(looped, "X", "Y", 1, True)
    assert not monovariate_condition(two, "X", "Y", 1, False)
    assert not monovariate_condition(y_looped, "X", "Y", 1, True)
    assert monovariate_decide(two, "X", "Y", 1, True).adjustment.kind == "A1"
    assert monovariate_decide(y_looped, "X", "Y", 1, True).witness is not None


def test_errors(fig2_g):
    with pytest.raises(NotAncestor):
        monovariate_decide(fig2_g, "Y", "X", 1)
    with pytest.raises(NotAncestor):
        monovariate_condition(SCG(["X"]), "X", "X", 1)
    with pytest.raises(UnknownVertex):
        monovariate_decide(fig2_g, "X", "nope", 1)
    with pytest.raises(ValueError):
        monovariate_condition(fig2_g, "X", "Y", -1)


def test_first_versus_full_union():
    # X <- A <- B -> Y with A and B outside Desc(X)
    g = SCG(["X", "Y", "A", "B"], [("X", "Y"), ("A", "X"), ("B", "A"), ("B", "Y")])
    region = descendants(g, "X")
    assert backdoor_first_outside(g, "X", "Y", region) == {"A"}
    assert backdoor_first_outside(g, "X", "Y", region, FULL) == {"A", "B"}


def test_a0_budget():
    names = [f"V{i}" for i in range(7)]
    g = SCG(names + ["X", "Y"], [(a, b) for a in names for b in names if a != b]
            + [(v, "X") for v in names] + [("X", "Y")] + [(v, "Y") for v in names])
    with pytest.raises(BudgetExceeded):
        backdoor_first_outside(g, "X", "Y", descendants(g, "X"), FULL, budget=50)


def test_cross_check_two_vertices():
    report = cross_check_monovariate(bounds=(2,))
    assert report.ok, report.to_json()
    assert report.checked > 0


def test_all_scgs_counts():
    assert sum(1 for _ in all_scgs(1)) == 2
    assert sum(1 for _ in all_scgs(2)) == 16


@settings(max_examples=150, deadline=None)
@given(scgs(2, 4), st.integers(2, 4))
def test_regimes_agree_from_gamma_two(g, gamma):
    for x in g.vertices:
        for y in descendants(g, x, strict=True):
            a = monovariate_decide(g, x, y, gamma, False).identifiable
            b = monovariate_decide(g, x, y, gamma, True).identifiable
            assert a == b


@settings(max_examples=100, deadline=None)
@given(scgs(2, 4), st.integers(0, 3), st.booleans())
def test_closed_form_matches_general_procedure(g, gamma, consistency):
    for x in g.vertices:
        for y in descendants(g, x, strict=True):
            if gamma == 0 and x == y:
                continue
            q = CausalQuery([(x, -gamma)], [(y, 0)])
            assert (monovariate_condition(g, x, y, gamma, consistency)
                    == decide(g, q, consistency).identifiable)


def _valid_everywhere(g, x, y, gamma, consistency, adj, cap=2 ** 16):
    q = CausalQuery([(x, -gamma)], [(y, 0)])
    spec = oracle.default_spec(g, q, consistency)
    if oracle.count_raw_candidates(spec) > cap:
        return True
    z = adj.materialize(g.vertices, spec.window)
    return all(oracle.backdoor_criterion(f, q.interventions, q.effects, z)
               for f in oracle.enumerate_candidates(spec, cap))


@pytest.mark.parametrize("consistency", [False, True])
def test_adjustment_sets_are_backdoor_sets_on_two_vertices(consistency):
    for g in all_scgs(2):
        for x in g.vertices:
            for y in descendants(g, x, strict=True):
                for gamma in (0, 1, 2):
                    if gamma == 0 and x == y:
                        continue
                    v = monovariate_decide(g, x, y, gamma, consistency)
                    if v.identifiable:
                        assert _valid_everywhere(g, x, y, gamma, consistency, v.adjustment), \
                            (sorted(g.edges), x, y, gamma)
