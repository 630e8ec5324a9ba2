import pytest

from anafrac.generators import codiscrete, directed, generate_example
from anafrac.mutation import (
    CARRIER_TABLES,
    SITE_TABLES,
    Mutation,
    apply_mutation,
    mutations,
    violations_after,
)


@pytest.mark.parametrize("name", ["trivial(monoid)", "codiscrete(2)"])
def test_every_single_entry_mutation_is_detected(name):
    S = generate_example(name)
    ms = mutations(S, per_table=None)
    assert {m.table for m in ms} >= set(CARRIER_TABLES)
    for m in ms:
        assert violations_after(S, m), m.describe(S.base)


def test_site_table_mutations_on_directed():
    S = directed(4)
    ms = mutations(S, per_table=None, tables=SITE_TABLES)
    assert {m.table for m in ms} == set(SITE_TABLES)
    for m in ms:
        assert violations_after(S, m), m.describe(S.base)


def test_mutations_are_seeded():
    S = codiscrete(4)
    a = mutations(S, per_table=2, seed=7)
    b = mutations(S, per_table=2, seed=7)
    assert a == b
    assert a != mutations(S, per_table=2, seed=8)


def test_mutation_changes_exactly_one_entry():
    S = codiscrete(2)
    m = next(m for m in mutations(S, per_table=1) if m.table == "comp1")
    T = apply_mutation(S, m).base
    f, g = m.key
    assert T.comp1(f, g) == m.new != m.old == S.base.comp1(f, g)
    others = [(a, b) for a in S.base.onecells() for b in S.base.hom(S.base.tgt(a), S.base.tgt(a)) if (a, b) != m.key]
    assert all(T.comp1(a, b) == S.base.comp1(a, b) for a, b in others)


def test_cover_mutation_replaces_with_non_cover():
    S = codiscrete(2)
    m = next(m for m in mutations(S, per_table=1) if m.table == "covers")
    T = apply_mutation(S, m)
    assert m.new in T.covers and m.old not in T.covers and m.new not in S.covers
    assert isinstance(m, Mutation) and m.describe(S.base)
