"""Single-entry mutations of a site, for testing that validation notices them.

A mutation overrides exactly one entry of one table (a composition table, an
identity table, the cover list or the pullback assignment) and leaves every
other lookup untouched. The replacement is another declared cell, chosen
with the same boundary whenever one exists, which is the harder case to
detect. A cover is replaced by a 1-cell outside the cover class.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from .site import PullbackSquare, Site, _check_square, validate_site
from .twocat import MalformedTable, TwoCategory, ValidationReport, validate_two_category

CARRIER_TABLES = ("id1", "comp1", "id2", "vcomp", "lwhisk", "rwhisk")
SITE_TABLES = ("covers", "pullbacks")


class MutatedTwoCategory(TwoCategory):
    """``base`` with one table entry replaced."""

    def __init__(self, base: TwoCategory, table: str, key, value):
        self.base = base
        self.objects = base.objects
        self.table, self.key, self.value = table, key, value

    def _pick(self, table, key, fn, *args):
        if table == self.table and key == self.key:
            return self.value
        return fn(*args)

    def hom(self, x, y):
        return self.base.hom(x, y)

    def src(self, f):
        return self.base.src(f)

    def tgt(self, f):
        return self.base.tgt(f)

    def id1(self, x):
        return self._pick("id1", x, self.base.id1, x)

    def comp1(self, f, g):
        return self._pick("comp1", (f, g), self.base.comp1, f, g)

    def is_onecell(self, f):
        return self.base.is_onecell(f)

    def cells_between(self, f, g):
        return self.base.cells_between(f, g)

    def src1(self, a):
        return self.base.src1(a)

    def tgt1(self, a):
        return self.base.tgt1(a)

    def id2(self, f):
        return self._pick("id2", f, self.base.id2, f)

    def vcomp(self, a, b):
        return self._pick("vcomp", (a, b), self.base.vcomp, a, b)

    def lwhisk(self, h, a):
        return self._pick("lwhisk", (h, a), self.base.lwhisk, h, a)

    def rwhisk(self, a, k):
        return self._pick("rwhisk", (a, k), self.base.rwhisk, a, k)

    def is_twocell(self, a):
        return self.base.is_twocell(a)

    def name(self, cell):
        return self.base.name(cell)


@dataclass(frozen=True)
class Mutation:
    table: str
    key: object
    old: object
    new: object

    def describe(self, K: TwoCategory) -> str:
        def nm(c):
            if isinstance(c, PullbackSquare):
                return f"square({K.name(c.apex)}, {K.name(c.pr_other)}, {K.name(c.pr_cover)})"
            return K.name(c) if c is not None else "-"

        key = self.key if isinstance(self.key, tuple) and self.table != "covers" else (self.key,)
        return f"{self.table}[{', '.join(nm(k) for k in key)}]: {nm(self.old)} -> {nm(self.new)}"


def apply_mutation(site: Site, m: Mutation) -> Site:
    if m.table in CARRIER_TABLES:
        K = MutatedTwoCategory(site.base, m.table, m.key, m.new)
        return Site(K, site.covers, site._pullbacks, name=site.name)
    if m.table == "covers":
        covers = set(site.covers)
        covers.discard(m.key)
        covers.add(m.new)
        # the pullback table itself is unchanged, squares of the old cover included
        squares = {(sq.cover, sq.other): sq for sq in site.assigned_squares()}
        return Site(site.base, covers, squares, name=site.name)
    if m.table == "pullbacks":
        def assign(j, f):
            return m.new if (j, f) == m.key else site.assigned(j, f)

        return Site(site.base, site.covers, assign, name=site.name)
    raise ValueError(f"unknown table {m.table!r}")


def violations_after(site: Site, m: Mutation) -> list[str]:
    """Laws the validators report on the mutated site (empty if unnoticed)."""
    mutated = apply_mutation(site, m)
    if m.table in SITE_TABLES:
        # the carrier is untouched
        return validate_site(mutated).laws()
    try:
        rep = validate_two_category(mutated.base)
    except MalformedTable as exc:
        return [f"malformed: {exc}"]
    if not rep.ok:
        return rep.laws()
    return validate_site(mutated).laws()


# ---------------------------------------------------------------------------
# choosing mutations


def _entries(site: Site, table: str):
    K = site.base
    objs = K.objects
    if table == "id1":
        for x in objs:
            yield x, K.id1(x)
    elif table == "comp1":
        for x, y, z in product(objs, repeat=3):
            for f in K.hom(x, y):
                for g in K.hom(y, z):
                    yield (f, g), K.comp1(f, g)
    elif table == "id2":
        for f in K.onecells():
            yield f, K.id2(f)
    elif table == "vcomp":
        for x, y in product(objs, repeat=2):
            hom = K.hom(x, y)
            for f, g, h in product(hom, repeat=3):
                for b in K.cells_between(f, g):
                    for a in K.cells_between(g, h):
                        yield (a, b), K.vcomp(a, b)
    elif table == "lwhisk":
        for x, y, z in product(objs, repeat=3):
            for a in K.twocells_in(x, y):
                for h in K.hom(y, z):
                    yield (h, a), K.lwhisk(h, a)
    elif table == "rwhisk":
        for x, y, z in product(objs, repeat=3):
            for a in K.twocells_in(y, z):
                for k in K.hom(x, y):
                    yield (a, k), K.rwhisk(a, k)
    elif table == "covers":
        for j in sorted(site.covers, key=K.name):
            yield j, j
    elif table == "pullbacks":
        for sq in site.assigned_squares():
            yield (sq.cover, sq.other), sq


def _replacement(site: Site, table: str, key, old, rng: random.Random):
    K = site.base
    if table == "covers":
        same = [f for f in K.hom(K.src(old), K.tgt(old)) if f not in site.covers]
        pool = same or sorted((f for f in K.onecells() if f not in site.covers), key=K.name)
        return rng.choice(pool) if pool else None
    if table == "pullbacks":
        # a leg differing by an automorphism of the apex is just another valid
        # choice of pullback, so only legs that break the square are used
        sq = old
        cands = [
            PullbackSquare(sq.cover, sq.other, sq.apex, p, sq.pr_cover)
            for p in K.hom(sq.apex, K.src(sq.other))
            if p != sq.pr_other
        ] + [
            PullbackSquare(sq.cover, sq.other, sq.apex, sq.pr_other, p)
            for p in K.hom(sq.apex, K.src(sq.cover))
            if p != sq.pr_cover
        ]
        rng.shuffle(cands)
        for cand in cands:
            rep = ValidationReport()
            _check_square(site, cand, rep)
            if not rep.ok:
                return cand
        return None
    if table in ("id1", "comp1"):
        same = [f for f in K.hom(K.src(old), K.tgt(old)) if f != old]
        pool = same or [f for f in K.onecells() if f != old]
    else:
        same = [a for a in K.cells_between(K.src1(old), K.tgt1(old)) if a != old]
        if same:
            pool = same
        else:
            x, y = K.src(K.src1(old)), K.tgt(K.src1(old))
            pool = [a for a in K.twocells_in(x, y) if a != old] or [a for a in K.twocells() if a != old]
    return rng.choice(pool) if pool else None


def mutations(site: Site, per_table: int | None = 1, *, seed: int = 0, tables=None) -> list[Mutation]:
    """Up to ``per_table`` seeded mutations per table; ``None`` means all entries."""
    rng = random.Random(seed)
    out = []
    for table in tables or CARRIER_TABLES + SITE_TABLES:
        entries = list(_entries(site, table))
        if table == "covers":
            # replacing an identity is caught trivially; prefer the others
            entries = [e for e in entries if not site.is_identity(e[0])] or entries
        if per_table is not None and len(entries) > per_table:
            entries = rng.sample(entries, per_table)
        for key, old in entries:
            new = _replacement(site, table, key, old, rng)
            if new is None:
                continue
            out.append(Mutation(table, key, old, new))
    return out
