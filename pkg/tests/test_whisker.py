import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from anafrac.checks import (
    Scope,
    all_maps,
    composable_pairs,
    fractions_within,
    pentagon_holds,
    replay_case_I_chain,
    replay_case_II_chain,
    replay_right_whisker_chain,
    replay_unit_chain,
    suite_appendix,
    suite_interchange,
    suite_pentagon,
    suite_whisker_functorial,
)
from anafrac.fractions import (
    FractionError,
    compose_fractions,
    identity_fraction,
    identity_map,
    vcompose_maps,
)
from anafrac.generators import codiscrete, directed, generate_example
from anafrac.site import MissingPullback
from anafrac.whisker import (
    associator,
    factor_fraction,
    hcompose_maps,
    left_whisker,
    left_whisker_I,
    left_whisker_II,
    right_whisker,
)

C8 = codiscrete(8)
D4 = directed(4)


def small(site, x, y, cap=2):
    return fractions_within(site, x, y, cap)


def test_factorisation_composes_on_the_nose():
    for F in small(C8, "E1", "E2"):
        first, second = factor_fraction(C8, F)
        assert compose_fractions(C8, first, second) == F


def test_whiskering_identities_gives_identities():
    for F in small(C8, "E1", "E2"):
        for G in small(C8, "E2", "E1"):
            FG = compose_fractions(C8, F, G)
            assert right_whisker(C8, identity_map(C8, F), G) == identity_map(C8, FG)
            assert left_whisker(C8, F, identity_map(C8, G)) == identity_map(C8, FG)


def test_whiskering_by_identity_fraction_is_trivial():
    for t in all_maps(D4, "2", "E2", 2)[:30]:
        assert right_whisker(D4, t, identity_fraction(D4, "E2")) == t
        assert left_whisker(D4, identity_fraction(D4, "2"), t) == t


def test_traces_carry_passing_certificates():
    F = small(C8, "E1", "E2")[0]
    for a in all_maps(C8, "E2", "E1", 2)[:10]:
        out, tr = left_whisker(C8, F, a, trace=True)
        assert tr.ok and tr.certificates
        assert "I.u_v12" in tr.apexes and "II.V12" in tr.apexes
        assert out == left_whisker(C8, F, a)
    for t in all_maps(C8, "E1", "E2", 2)[:10]:
        out, tr = right_whisker(C8, t, small(C8, "E2", "E1")[-1], trace=True)
        assert tr.ok and tr.kind == "right"


def test_cases_reject_the_wrong_shape():
    F = next(F for F in small(C8, "E1", "E2") if F.cover != C8.base.id1(F.apex))
    a = all_maps(C8, "E2", "E1", 2)[0]
    with pytest.raises(FractionError):
        left_whisker_I(C8, F, a)
    G = next(F for F in small(C8, "E1", "E2") if F.arrow != C8.base.id1(F.apex))
    with pytest.raises(FractionError):
        left_whisker_II(C8, G, a)
    with pytest.raises(FractionError):
        right_whisker(C8, a, a.source)


def test_whiskering_preserves_composition_on_directed():
    n = 0
    for G in small(D4, "2", "2"):
        for a1, a2 in composable_pairs(D4, "1", "2", 2):
            try:
                lhs = right_whisker(D4, vcompose_maps(D4, a1, a2), G)
                rhs = vcompose_maps(D4, right_whisker(D4, a1, G), right_whisker(D4, a2, G))
            except MissingPullback:
                continue
            assert lhs == rhs
            n += 1
    for F in small(D4, "1", "2"):
        for b1, b2 in composable_pairs(D4, "2", "2", 2):
            try:
                lhs = left_whisker(D4, F, vcompose_maps(D4, b1, b2))
                rhs = vcompose_maps(D4, left_whisker(D4, F, b1), left_whisker(D4, F, b2))
            except MissingPullback:
                continue
            assert lhs == rhs
            n += 1
    assert n > 40


def test_replayed_chains_hold():
    pairs = list(composable_pairs(C8, "E1", "E2", 1))
    assert pairs
    G = small(C8, "E2", "E1")[0]
    for a1, a2 in pairs[:5]:
        assert replay_right_whisker_chain(C8, a1, a2, G).ok
        assert replay_unit_chain(C8, a1).ok
    pairs = list(composable_pairs(C8, "E2", "E1", 1))
    FI = next(F for F in small(C8, "E1", "E2") if F.cover == C8.base.id1(F.apex))
    FII = next(F for F in small(C8, "E1", "E2", 2) if F.arrow == C8.base.id1(F.apex))
    for a1, a2 in pairs[:5]:
        ch = replay_case_I_chain(C8, FI, a1, a2)
        assert ch.ok and ch.steps
        ch = replay_case_II_chain(C8, FII, a1, a2)
        assert ch.ok and ch.steps


def test_horizontal_composite_of_identities():
    # apex 1 keeps every pullback within the size bound
    F = next(F for F in small(D4, "1", "2") if F.apex == "1")
    G = small(D4, "2", "2")[-1]
    out = hcompose_maps(D4, identity_map(D4, F), identity_map(D4, G))
    assert out == identity_map(D4, compose_fractions(D4, F, G))


def test_associator_is_identity_on_trivial_site():
    S = generate_example("trivial(monoid)")
    fr = small(S, "BM", "BM", None)
    for F1 in fr[:3]:
        for F2 in fr[:3]:
            for F3 in fr[:3]:
                A = associator(S, F1, F2, F3)
                assert A.source == A.target and A == identity_map(S, A.source)


def test_associator_is_invertible():
    fr = small(C8, "E1", "E1", 1) + small(C8, "E1", "E1", 2)[:2]
    for F1 in fr[:2]:
        for F2 in fr[:2]:
            for F3 in fr[:2]:
                try:
                    A = associator(C8, F1, F2, F3)
                except MissingPullback:
                    continue
                assert A.source == compose_fractions(C8, compose_fractions(C8, F1, F2), F3)
                assert A.target == compose_fractions(C8, F1, compose_fractions(C8, F2, F3))


def test_pentagon_on_small_chains():
    fr = small(C8, "E1", "E1", 1) + small(C8, "E1", "E2", 2)[:1]
    F1 = fr[0]
    G = small(C8, "E1", "E1", 2)
    checked = 0
    for F2 in G[:3]:
        for F3 in G[:2]:
            try:
                assert pentagon_holds(C8, F1, F2, F3, F1)
            except MissingPullback:
                continue
            checked += 1
    assert checked


@pytest.mark.parametrize(
    "suite, scope",
    [
        (suite_whisker_functorial, Scope(("2", "E2"), 2, 2)),
        (suite_appendix, Scope(("2", "E2"), 2, 2)),
        (suite_interchange, Scope(("1", "2"), 2)),
        (suite_pentagon, Scope(("1", "2"), 2)),
    ],
)
def test_suites_pass_on_small_scopes(suite, scope):
    res = suite(D4, scope)
    assert res.ok, res.failures[:3]
    assert sum(res.checked.values()) > 0


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_interchange_on_random_maps(data):
    objs = ("1", "2", "E2")
    x, y, z = (data.draw(st.sampled_from(objs)) for _ in range(3))
    as_ = all_maps(D4, x, y, 2)
    bs = all_maps(D4, y, z, 2)
    assume(as_ and bs)
    a = data.draw(st.sampled_from(as_))
    b = data.draw(st.sampled_from(bs))
    try:
        hcompose_maps(D4, a, b, check=True)
    except MissingPullback:
        assume(False)
