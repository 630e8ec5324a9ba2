import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from anafrac.fincat import (
    functors,
    poset_category,
    terminal_category,
    transformations,
    two_category_of,
    walking_arrow,
)
from anafrac.generators import (
    codiscrete,
    directed,
    generate_example,
    monoid_two_category,
    terminal_two_category,
)
from anafrac.mutation import MutatedTwoCategory
from anafrac.twocat import (
    CapExceeded,
    MalformedTable,
    NotComposable,
    TabulatedTwoCategory,
    compose1,
    hom_category,
    inverse_2cell,
    is_invertible_2cell,
    size_caps,
    validate_two_category,
    vcomp2,
    whisker_left,
    whisker_right,
)


# -- counting oracles -------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_codiscrete_hom_counts(n):
    K = codiscrete(n).base
    for x in K.objects:
        for y in K.objects:
            a, b = K.shapes[x].a, K.shapes[y].a
            # each output bit: two constants or a possibly negated input bit
            assert len(K.hom(x, y)) == (2 + 2 * a) ** b


def test_codiscrete2_counts():
    S = codiscrete(2)
    assert S.base.counts() == {"objects": 2, "onecells": 8, "twocells": 22}
    assert len(S.covers) == 4


def test_codiscrete4_counts():
    S = codiscrete(4)
    assert S.base.counts() == {"objects": 3, "onecells": 71, "twocells": 1627}
    # surjective coordinate maps E2^a -> E2^b: injective signed choice of bits
    assert len(S.covers) == 17


def test_directed_hom_counts():
    K = directed(8).base
    for x in K.objects:
        for y in K.objects:
            s, t = K.shapes[x], K.shapes[y]
            assert len(K.hom(x, y)) == s.a ** t.a * (2 + s.b) ** t.b


@pytest.mark.parametrize("name", ["codiscrete(4)", "directed(8)"])
def test_coordinate_composition_is_function_composition(name):
    K = generate_example(name).base
    objs = K.objects[:4]
    for x in objs:
        for y in objs:
            for z in objs:
                for f in K.hom(x, y)[:12]:
                    for g in K.hom(y, z)[:12]:
                        gf = K.comp1(f, g)
                        for e in K.shapes[x].elements():
                            assert K.apply(gf, e) == K.apply(g, K.apply(f, e))


def test_coordinate_two_cells_are_pointwise_order():
    K = directed(8).base
    for x in ("2", "E2x2"):
        for y in ("2", "E2x2"):
            for f in K.hom(x, y):
                for g in K.hom(x, y):
                    pointwise = all(
                        all(p <= q for p, q in zip(K.apply(f, e)[1], K.apply(g, e)[1]))
                        and K.apply(f, e)[0] == K.apply(g, e)[0]
                        for e in K.shapes[x].elements()
                    )
                    assert bool(K.cells_between(f, g)) == pointwise


def test_fincat_functor_counts():
    one, two = terminal_category(), walking_arrow()
    assert len(functors(two, two)) == 3
    assert len(functors(one, two)) == 2
    assert len(functors(two, one)) == 1
    square = poset_category("2x2", [(p, q) for p in (0, 1) for q in (0, 1)],
                            lambda s, t: s[0] <= t[0] and s[1] <= t[1])
    # monotone maps 2 -> 2x2: pairs p <= q in a 4-element poset with 9 relations
    assert len(functors(two, square)) == 9


def test_fincat_transformations():
    two = walking_arrow()
    fs = functors(two, two)
    ident = next(F for F in fs if F[0] == {0: 0, 1: 1})
    const0 = next(F for F in fs if F[0] == {0: 0, 1: 0})
    assert len(transformations(two, two, const0, ident)) == 1
    assert len(transformations(two, two, ident, const0)) == 0


# -- validation -------------------------------------------------------------


@pytest.mark.parametrize(
    "name", ["trivial(terminal)", "trivial(monoid)", "codiscrete(2)", "codiscrete(4)", "directed(4)", "directed(8)"]
)
def test_generated_carriers_validate(name):
    rep = validate_two_category(generate_example(name).base)
    assert rep.ok, rep.violations[:3]
    assert rep.checked["interchange"] > 0


def test_fincat_carriers_validate():
    K, _ = monoid_two_category()
    assert validate_two_category(K).ok
    K2, _ = two_category_of([terminal_category(), walking_arrow()])
    assert validate_two_category(K2).ok


def test_materialize_preserves_tables():
    K = directed(4).base
    T = TabulatedTwoCategory.materialize(K)
    assert T.counts() == K.counts()
    assert validate_two_category(T).ok
    for f in list(K.onecells())[:20]:
        for g in K.hom(K.tgt(f), K.tgt(f)):
            assert T.comp1(f, g) == K.comp1(f, g)


def test_missing_entry_is_malformed():
    K = terminal_two_category()
    K.vcomp_table.clear()
    with pytest.raises(MalformedTable):
        validate_two_category(K)


def test_wrong_composite_is_reported_with_witness():
    K = codiscrete(2).base
    f = K.hom("E1", "E2")[0]
    g = K.hom("E2", "E2")[0]
    wrong = next(h for h in K.hom("E1", "E2") if h != K.comp1(f, g))
    rep = validate_two_category(MutatedTwoCategory(K, "comp1", (f, g), wrong))
    assert not rep.ok
    assert any(f in v.witness or g in v.witness for v in rep.violations)


def test_validation_budget():
    with pytest.raises(CapExceeded):
        validate_two_category(codiscrete(8).base)


def test_caps_environment(monkeypatch):
    monkeypatch.setenv("ANAFRAC_CAPS", "2,100,100")
    assert size_caps() == {"objects": 2, "onecells": 100, "twocells": 100}
    with pytest.raises(CapExceeded):
        codiscrete(4)
    monkeypatch.setenv("ANAFRAC_CAPS", "1,2")
    with pytest.raises(ValueError):
        size_caps()


# -- elementary operations --------------------------------------------------


def test_checked_operations_reject_mismatches():
    K = codiscrete(2).base
    f = K.hom("E1", "E2")[0]
    with pytest.raises(NotComposable):
        compose1(K, f, f)
    a = K.cells_between(K.hom("E1", "E2")[0], K.hom("E1", "E2")[1])[0]
    with pytest.raises(NotComposable):
        vcomp2(K, a, a)
    with pytest.raises(NotComposable):
        whisker_left(K, f, a)
    with pytest.raises(NotComposable):
        whisker_right(K, a, f)


def test_invertibility():
    K = directed(4).base
    c0, ident = K.hom("2", "2")[0], K.id1("2")
    (a,) = K.cells_between(c0, ident)
    assert not is_invertible_2cell(K, a)
    C = codiscrete(2).base
    f, g = C.hom("E1", "E2")
    (b,) = C.cells_between(f, g)
    inv = inverse_2cell(C, b)
    assert C.vcomp(inv, b) == C.id2(f)


def test_hom_category_of_monoid_carrier_is_noncommutative():
    K, _ = monoid_two_category()
    H = hom_category(K, "BM", "BM")
    assert not H.axiom_violations()
    endo = [a for a in H.arrows if H.dom[a] == H.cod[a]]
    assert any(H.compose[a, b] != H.compose[b, a] for a in endo for b in endo if H.dom[a] == H.dom[b])


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_interchange_on_random_cells(data):
    K = directed(8).base
    x, y, z = (data.draw(st.sampled_from(K.objects)) for _ in range(3))
    fs = K.hom(x, y)
    hs = K.hom(y, z)
    assume(fs and hs)
    f, g = data.draw(st.sampled_from(fs)), data.draw(st.sampled_from(fs))
    h, k = data.draw(st.sampled_from(hs)), data.draw(st.sampled_from(hs))
    for a in K.cells_between(f, g):
        for b in K.cells_between(h, k):
            lhs = K.vcomp(K.rwhisk(b, g), K.lwhisk(h, a))
            rhs = K.vcomp(K.lwhisk(k, a), K.rwhisk(b, f))
            assert lhs == rhs == K.hcomp(a, b)
