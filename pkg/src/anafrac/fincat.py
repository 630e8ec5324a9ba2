"""Brute-force 2-categories of small finite categories.

Given a handful of finite categories, enumerate every functor between them
and every natural transformation between parallel functors, and tabulate the
result as a :class:`TabulatedTwoCategory`. Only practical for very small
categories; the generated sites with larger carriers use
:mod:`anafrac.coordinate` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .twocat import TabulatedTwoCategory


@dataclass
class FinCat:
    """A finite category; ``comp[(f, g)]`` is *g after f*."""

    name: str
    objects: tuple
    arrows: dict  # arrow -> (dom, cod)
    identity: dict
    comp: dict

    def hom(self, x, y):
        return [a for a, (d, c) in self.arrows.items() if d == x and c == y]


def monoid_category(name: str, elements, mult, unit) -> FinCat:
    """One-object category; ``mult(a, b)`` is *a after b*."""
    arrows = {m: ("*", "*") for m in elements}
    comp = {(f, g): mult(g, f) for f in elements for g in elements}
    return FinCat(name, ("*",), arrows, {"*": unit}, comp)


def poset_category(name: str, elements, le) -> FinCat:
    arrows = {(p, q): (p, q) for p in elements for q in elements if le(p, q)}
    comp = {}
    for (p, q) in arrows:
        for (q2, r) in arrows:
            if q == q2:
                comp[(p, q), (q, r)] = (p, r)
    return FinCat(name, tuple(elements), arrows, {p: (p, p) for p in elements}, comp)


def terminal_category() -> FinCat:
    return poset_category("1", ("*",), lambda p, q: True)


def walking_arrow() -> FinCat:
    return poset_category("2", (0, 1), lambda p, q: p <= q)


def functors(C: FinCat, D: FinCat):
    """All functors ``C -> D`` as ``(object_map, arrow_map)`` dict pairs."""
    out = []
    c_objs = list(C.objects)
    c_arrows = list(C.arrows)
    for images in product(D.objects, repeat=len(c_objs)):
        omap = dict(zip(c_objs, images))
        choices = [D.hom(omap[C.arrows[a][0]], omap[C.arrows[a][1]]) for a in c_arrows]
        for amap_vals in product(*choices):
            amap = dict(zip(c_arrows, amap_vals))
            if any(amap[C.identity[x]] != D.identity[omap[x]] for x in c_objs):
                continue
            if all(amap[h] == D.comp[amap[f], amap[g]] for (f, g), h in C.comp.items()):
                out.append((omap, amap))
    return out


def transformations(C: FinCat, D: FinCat, F, G):
    """All natural transformations ``F => G`` as component dicts."""
    objs = list(C.objects)
    choices = [D.hom(F[0][x], G[0][x]) for x in objs]
    out = []
    for comps in product(*choices):
        t = dict(zip(objs, comps))
        if all(
            D.comp[F[1][a], t[d2]] == D.comp[t[d1], G[1][a]]
            for a, (d1, d2) in C.arrows.items()
        ):
            out.append(t)
    return out


def two_category_of(cats: list[FinCat]) -> tuple[TabulatedTwoCategory, dict]:
    """Tabulate the full sub-2-category of Cat on ``cats``.

    Returns the 2-category and a semantics dict mapping every 1-cell id to
    its ``(object_map, arrow_map)`` and every 2-cell id to its components.
    """
    by_name = {C.name: C for C in cats}
    one, sem1 = {}, {}
    homs = {}
    for C in cats:
        for D in cats:
            ids = []
            for n, F in enumerate(functors(C, D)):
                fid = f"{C.name}->{D.name}#{n}"
                one[fid] = (C.name, D.name)
                sem1[fid] = F
                ids.append(fid)
            homs[C.name, D.name] = ids

    def key(F):
        return (tuple(sorted(F[0].items(), key=repr)), tuple(sorted(F[1].items(), key=repr)))

    lookup1 = {}
    for fid, F in sem1.items():
        lookup1[one[fid], key(F)] = fid

    two, sem2, lookup2 = {}, {}, {}
    for (c, d), ids in homs.items():
        C, D = by_name[c], by_name[d]
        for f in ids:
            for g in ids:
                for n, t in enumerate(transformations(C, D, sem1[f], sem1[g])):
                    aid = f"{f}=>{g}#{n}"
                    two[aid] = (f, g)
                    sem2[aid] = t
                    lookup2[f, g, tuple(sorted(t.items(), key=repr))] = aid

    def cell(f, g, comps):
        return lookup2[f, g, tuple(sorted(comps.items(), key=repr))]

    def compose_functors(f, g):
        F, G = sem1[f], sem1[g]
        om = {x: G[0][F[0][x]] for x in F[0]}
        am = {a: G[1][F[1][a]] for a in F[1]}
        return lookup1[(one[f][0], one[g][1]), key((om, am))]

    comp1 = {}
    for (c, d), fs in homs.items():
        for e in by_name:
            for f in fs:
                for g in homs[d, e]:
                    comp1[f, g] = compose_functors(f, g)
    id1 = {}
    for C in cats:
        ident = ({x: x for x in C.objects}, {a: a for a in C.arrows})
        id1[C.name] = lookup1[(C.name, C.name), key(ident)]
    id2 = {}
    for f, (c, d) in one.items():
        D = by_name[d]
        id2[f] = cell(f, f, {x: D.identity[y] for x, y in sem1[f][0].items()})
    vcomp = {}
    by_src: dict = {}
    for a, (f, g) in two.items():
        by_src.setdefault(f, []).append(a)
    for b, (f, g) in two.items():
        D = by_name[one[f][1]]
        for a in by_src.get(g, ()):
            h = two[a][1]
            comps = {x: D.comp[sem2[b][x], sem2[a][x]] for x in sem2[b]}
            vcomp[a, b] = cell(f, h, comps)
    lw, rw = {}, {}
    for a, (f, g) in two.items():
        c, d = one[f]
        for e in by_name:
            for h in homs[d, e]:
                comps = {x: sem1[h][1][m] for x, m in sem2[a].items()}
                lw[h, a] = cell(comp1[f, h], comp1[g, h], comps)
            for k in homs[e, c]:
                comps = {x: sem2[a][sem1[k][0][x]] for x in by_name[e].objects}
                rw[a, k] = cell(comp1[k, f], comp1[k, g], comps)
    K = TabulatedTwoCategory([C.name for C in cats], one, two, comp1, id1, vcomp, id2, lw, rw)
    K.sizes = {C.name: len(C.objects) for C in cats}
    return K, {**sem1, **sem2}
