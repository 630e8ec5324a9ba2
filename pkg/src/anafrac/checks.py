"""Check suites: the hom-category, whiskering and coherence laws of ``K_J``.

Each suite returns a :class:`~anafrac.report.SuiteResult`. Instances whose
constructions need a pullback the site does not assign are counted as
skipped, never as passes. The proof chains replay a derivation step by step:
every displayed equality is computed from its own formula and compared with
its neighbour, so a wrong intermediate step is reported even when the end
points happen to agree.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .fractions import (
    Fraction,
    FractionMap,
    build_hom_category,
    compose_fractions,
    compose_renamings,
    enumerate_fractions,
    fraction_name,
    identity_fraction,
    identity_map,
    identity_renaming,
    iota,
    map_name,
    map_square,
    maps_between,
    precompose_maps,
    renamings_between,
    section_of,
    triple_data,
    vcompose_maps,
)
from .report import SuiteResult
from .site import (
    MissingPullback,
    Site,
    induced_arrow,
    iterated_pullback,
    lift_2cell,
    mediate,
    pullback,
    unique_lift_2cell,
)
from .whisker import (
    InterchangeViolation,
    associator,
    case_II_data,
    hcompose_maps,
    left_whisker,
    left_whisker_I,
    left_whisker_II,
    right_whisker,
)

# ---------------------------------------------------------------------------
# scopes


@dataclass(frozen=True)
class Scope:
    """Which fractions a suite ranges over.

    ``objects`` bounds the endpoints; ``apex`` bounds the apex size of the
    fractions carrying the maps, ``whisker_apex`` that of the fractions
    they are whiskered by. ``None`` means unbounded.
    """

    objects: Optional[tuple] = None
    apex: Optional[int] = None
    whisker_apex: Optional[int] = None

    def objs(self, site: Site) -> tuple:
        return tuple(site.base.objects) if self.objects is None else tuple(self.objects)

    def as_dict(self) -> dict:
        return {
            "objects": None if self.objects is None else [str(x) for x in self.objects],
            "apex": self.apex,
            "whisker_apex": self.whisker_apex,
        }


def fractions_within(site: Site, x, y, cap=None) -> list:
    K = site.base
    return [F for F in enumerate_fractions(site, x, y) if cap is None or K.object_size(F.apex) <= cap]


def case_I_fractions(site: Site, y, objects) -> list:
    """Fractions ``(id_w, f)`` into ``y``."""
    K = site.base
    return [Fraction(w, y, w, K.id1(w), f) for w in objects for f in K.hom(w, y)]


def case_II_fractions(site: Site, u, objects) -> list:
    """Fractions ``(j, id_u)`` for the covers ``j`` out of ``u``."""
    K = site.base
    covers = sorted((j for j in site.covers if K.src(j) == u and K.tgt(j) in objects), key=K.name)
    return [Fraction(K.tgt(j), u, u, j, K.id1(u)) for j in covers]


def _maps_table(site: Site, fracs):
    table = {}
    for F in fracs:
        for G in fracs:
            try:
                table[F, G] = maps_between(site, F, G)
            except MissingPullback:
                pass
    return table


def composable_pairs(site: Site, x, y, cap=None, res: Optional[SuiteResult] = None):
    """Pairs ``(a1, a2)`` of maps in ``K_J(x, y)`` whose composite ``a1 + a2`` exists."""
    fracs = fractions_within(site, x, y, cap)
    table = _maps_table(site, fracs)
    for F1, F2, F3 in product(fracs, repeat=3):
        m12, m23 = table.get((F1, F2)), table.get((F2, F3))
        if not m12 or not m23:
            continue
        try:
            triple_data(site, F1.cover, F2.cover, F3.cover)
        except MissingPullback:
            if res is not None:
                res.skip("pair-without-triple-pullback", len(m12) * len(m23))
            continue
        for a1 in m12:
            for a2 in m23:
                yield a1, a2


def all_maps(site: Site, x, y, cap=None) -> list:
    fracs = fractions_within(site, x, y, cap)
    return [t for ts in _maps_table(site, fracs).values() for t in ts]


# ---------------------------------------------------------------------------
# proof chains


def paste(K, *cells):
    """Vertical composite of ``cells`` in order of application (first cell first)."""
    out = cells[0]
    for c in cells[1:]:
        out = K.vcomp(c, out)
    return out


@dataclass
class ChainReplay:
    """The steps of one replayed derivation; ``steps`` holds ``(label, holds)``."""

    name: str
    steps: list = field(default_factory=list)

    def step(self, label: str, holds: bool) -> bool:
        self.steps.append((label, bool(holds)))
        return holds

    def equal_chain(self, labelled_values) -> None:
        """Assert consecutive equalities ``v0 = v1 = ...``."""
        for (la, va), (lb, vb) in zip(labelled_values, labelled_values[1:]):
            self.step(f"{la} = {lb}", va == vb)

    @property
    def ok(self) -> bool:
        return all(h for _, h in self.steps)


def replay_right_whisker_chain(site: Site, t1: FractionMap, t2: FractionMap, G: Fraction) -> ChainReplay:
    """``rho(t1 + t2) = rho t1 + rho t2`` for ``rho`` right whiskering by ``G = (l, h)``.

    Both sides are restricted to the triple pullback of the composite covers
    and the lift through ``l`` is traced through the descent defining ``+``.
    """
    K = site.base
    ch = ChainReplay("right-whisker")
    l, h = G.cover, G.arrow
    F1, F2, F3 = t1.source, t1.target, t2.target
    t12 = vcompose_maps(site, t1, t2)
    C = [compose_fractions(site, F, G) for F in (F1, F2, F3)]
    P = [pullback(site, l, F.arrow) for F in (F1, F2, F3)]
    rho12, rho1, rho2 = (right_whisker(site, t, G) for t in (t12, t1, t2))
    rhs = vcompose_maps(site, rho1, rho2)
    T = triple_data(site, *(c.cover for c in C))  # q'_ab
    it = iterated_pullback(site, [c.cover for c in C])
    U = triple_data(site, F1.cover, F2.cover, F3.cover)  # n_ab
    n = mediate(site, [F.cover for F in (F1, F2, F3)], [K.comp1(it.pr[i], P[i].pr_other) for i in range(3)])

    def m(ta, a, b):
        Q = map_square(site, C[a], C[b])
        return induced_arrow(
            site, ta.square, K.comp1(Q.pr_other, P[a].pr_other), K.comp1(Q.pr_cover, P[b].pr_other)
        )

    m13, m12, m23 = m(t12, 0, 2), m(t1, 0, 1), m(t2, 1, 2)
    into_w = [K.comp1(it.pr[i], P[i].pr_cover) for i in range(3)]
    A, B = into_w[0], into_w[2]
    ch.step("m13.q'13 = n13.n", K.comp1(T.q13, m13) == K.comp1(n, U.q13))
    ch.step("m12.q'12 = n12.n", K.comp1(T.q12, m12) == K.comp1(n, U.q12))
    ch.step("m23.q'23 = n23.n", K.comp1(T.q23, m23) == K.comp1(n, U.q23))
    oplus = paste(K, K.rwhisk(t1.cell, U.q12), K.rwhisk(t2.cell, U.q23))
    # lambda_ab: the lifts through l defining each rho
    lam12 = lift_2cell(K, l, into_w[0], into_w[1], K.rwhisk(t1.cell, K.comp1(T.q12, m12)))
    lam23 = lift_2cell(K, l, into_w[1], into_w[2], K.rwhisk(t2.cell, K.comp1(T.q23, m23)))
    steps = [
        ("R0", K.rwhisk(rho12.cell, T.q13)),
        ("R1", K.lwhisk(h, lift_2cell(K, l, A, B, K.rwhisk(t12.cell, K.comp1(T.q13, m13))))),
        ("R2", K.lwhisk(h, lift_2cell(K, l, A, B, K.rwhisk(t12.cell, K.comp1(n, U.q13))))),
        ("R3", K.lwhisk(h, lift_2cell(K, l, A, B, K.rwhisk(oplus, n)))),
        ("R4", K.lwhisk(h, lift_2cell(K, l, A, B, paste(K, K.rwhisk(t1.cell, K.comp1(n, U.q12)), K.rwhisk(t2.cell, K.comp1(n, U.q23)))))),
        ("R5", K.lwhisk(h, lift_2cell(K, l, A, B, paste(K, K.rwhisk(t1.cell, K.comp1(T.q12, m12)), K.rwhisk(t2.cell, K.comp1(T.q23, m23)))))),
        ("R6", K.lwhisk(h, paste(K, lam12, lam23))),
        ("R7", precompose_maps(site, rho1, rho2)),
        ("R8", K.rwhisk(rhs.cell, T.q13)),
    ]
    ch.equal_chain(steps)
    ch.step("rho(t1+t2) = rho t1 + rho t2", rho12 == rhs)
    return ch


def replay_case_I_chain(site: Site, F: Fraction, a1: FractionMap, a2: FractionMap) -> ChainReplay:
    """``lambda(a1 + a2) = lambda a1 + lambda a2`` for ``F = (id_u, f)``."""
    K = site.base
    ch = ChainReplay("left-whisker-I")
    G1, G2, G3 = a1.source, a1.target, a2.target
    a12 = vcompose_maps(site, a1, a2)
    C = [compose_fractions(site, F, G) for G in (G1, G2, G3)]
    B = [pullback(site, G.cover, F.arrow) for G in (G1, G2, G3)]
    l12, l1, l2 = (left_whisker_I(site, F, a) for a in (a12, a1, a2))
    rhs = vcompose_maps(site, l1, l2)
    T = triple_data(site, *(c.cover for c in C))  # q'_ab
    it = iterated_pullback(site, [c.cover for c in C])
    V = triple_data(site, G1.cover, G2.cover, G3.cover)  # n_ab on v123
    n = mediate(site, [G.cover for G in (G1, G2, G3)], [K.comp1(it.pr[i], B[i].pr_cover) for i in range(3)])

    def m(a, i, j):
        Q = map_square(site, C[i], C[j])
        return induced_arrow(
            site, a.square, K.comp1(Q.pr_other, B[i].pr_cover), K.comp1(Q.pr_cover, B[j].pr_cover)
        )

    m13, m12, m23 = m(a12, 0, 2), m(a1, 0, 1), m(a2, 1, 2)
    ch.step("m13.q'13 = n13.n", K.comp1(T.q13, m13) == K.comp1(n, V.q13))
    ch.step("n12.n = m12.q'12", K.comp1(n, V.q12) == K.comp1(T.q12, m12))
    ch.step("n23.n = m23.q'23", K.comp1(n, V.q23) == K.comp1(T.q23, m23))
    oplus = paste(K, K.rwhisk(a1.cell, V.q12), K.rwhisk(a2.cell, V.q23))
    steps = [
        ("S0", K.rwhisk(l12.cell, T.q13)),
        ("S1", K.rwhisk(a12.cell, K.comp1(T.q13, m13))),
        ("S2", K.rwhisk(a12.cell, K.comp1(n, V.q13))),
        ("S3", K.rwhisk(oplus, n)),
        ("S4", paste(K, K.rwhisk(a1.cell, K.comp1(n, V.q12)), K.rwhisk(a2.cell, K.comp1(n, V.q23)))),
        ("S5", paste(K, K.rwhisk(l1.cell, T.q12), K.rwhisk(a2.cell, K.comp1(n, V.q23)))),
        ("S6", precompose_maps(site, l1, l2)),
        ("S7", K.rwhisk(rhs.cell, T.q13)),
    ]
    ch.equal_chain(steps)
    ch.step("lambda(a1+a2) = lambda a1 + lambda a2", l12 == rhs)
    return ch


def replay_case_II_chain(site: Site, F: Fraction, a1: FractionMap, a2: FractionMap) -> ChainReplay:
    """``lambda(a1 + a2) = lambda a1 + lambda a2`` for ``F = (j, id_u)``.

    Everything is restricted to ``X = v123 x_x V123`` along
    ``N13 . piV``; ``w_ab: X -> v_ab x_x V_ab`` compares ``X`` with the
    objects the three descents were performed on.
    """
    K = site.base
    ch = ChainReplay("left-whisker-II")
    G = (a1.source, a1.target, a2.target)
    a12 = vcompose_maps(site, a1, a2)
    C = [compose_fractions(site, F, g) for g in G]
    c = [x.cover for x in C]
    l12, l1, l2 = (left_whisker_II(site, F, a) for a in (a12, a1, a2))
    rhs = vcompose_maps(site, l1, l2)
    Vt = triple_data(site, *c)  # N_ab on V123 (over x)
    vt = triple_data(site, *(g.cover for g in G))  # n_ab on v123 (over u)
    itV = iterated_pullback(site, c)
    itv = iterated_pullback(site, [g.cover for g in G])
    c_V123 = itV.cover_map
    c_v123 = K.comp1(itv.cover_map, F.cover)
    X = pullback(site, c_v123, c_V123)
    piV, piv = X.pr_other, X.pr_cover
    P = [K.comp1(piV, p) for p in itV.pr]  # X -> v_i via V123
    p = [K.comp1(piv, q) for q in itv.pr]  # X -> v_i via v123
    g = [x.arrow for x in G]

    def data(a, i, j):
        Vsq = map_square(site, C[i], C[j])
        d = case_II_data(site, F, a, C[i], C[j], Vsq)
        N = {(0, 1): Vt.q12, (1, 2): Vt.q23, (0, 2): Vt.q13}[i, j]
        nn = {(0, 1): vt.q12, (1, 2): vt.q23, (0, 2): vt.q13}[i, j]
        w = induced_arrow(site, d.W, K.comp1(piV, N), K.comp1(piv, nn))
        return d, w, N, nn

    d13, w13, N13, n13 = data(a12, 0, 2)
    d12, w12, N12, n12 = data(a1, 0, 1)
    d23, w23, N23, n23 = data(a2, 1, 2)
    lift = lambda i, A, B: unique_lift_2cell(site, c[i], A, B)  # noqa: E731
    lam1 = lift(0, P[0], p[0])
    lam3 = lift(2, p[2], P[2])
    lam2 = lift(1, p[1], P[1])
    lam2b = lift(1, P[1], p[1])
    ch.step("mu1 restricted along w13 = canonical lift", K.rwhisk(d13.mu1, w13) == lam1)
    ch.step("mu2 restricted along w13 = canonical lift", K.rwhisk(d13.mu2, w13) == lam3)
    oplus = paste(K, K.rwhisk(a1.cell, vt.q12), K.rwhisk(a2.cell, vt.q23))
    steps = [
        ("S0", K.rwhisk(l12.cell, K.comp1(piV, N13))),
        ("S1", K.rwhisk(d13.rhs, w13)),
        ("S2", paste(K, K.lwhisk(g[0], lam1), K.rwhisk(a12.cell, K.comp1(piv, n13)), K.lwhisk(g[2], lam3))),
        ("S3", paste(K, K.lwhisk(g[0], lam1), K.rwhisk(oplus, piv), K.lwhisk(g[2], lam3))),
        (
            "S4",
            paste(
                K,
                K.lwhisk(g[0], lam1),
                K.rwhisk(a1.cell, K.comp1(piv, n12)),
                K.rwhisk(a2.cell, K.comp1(piv, n23)),
                K.lwhisk(g[2], lam3),
            ),
        ),
        (
            "S5",
            paste(
                K,
                K.lwhisk(g[0], lam1),
                K.rwhisk(a1.cell, K.comp1(piv, n12)),
                K.lwhisk(g[1], lam2),
                K.lwhisk(g[1], lam2b),
                K.rwhisk(a2.cell, K.comp1(piv, n23)),
                K.lwhisk(g[2], lam3),
            ),
        ),
        ("S6", paste(K, K.rwhisk(d12.rhs, w12), K.rwhisk(d23.rhs, w23))),
        ("S7", paste(K, K.rwhisk(l1.cell, K.comp1(piV, N12)), K.rwhisk(l2.cell, K.comp1(piV, N23)))),
        ("S8", K.rwhisk(precompose_maps(site, l1, l2), piV)),
        ("S9", K.rwhisk(rhs.cell, K.comp1(piV, N13))),
    ]
    ch.equal_chain(steps)
    ch.step("lambda(a1+a2) = lambda a1 + lambda a2", l12 == rhs)
    return ch


def replay_unit_chain(site: Site, t: FractionMap) -> ChainReplay:
    """``1 + t = t``: the left unit law traced through the triple pullback over ``(j, j, k)``."""
    K = site.base
    ch = ChainReplay("left-unit")
    F, G = t.source, t.target
    one = identity_map(site, F)
    T = triple_data(site, F.cover, F.cover, G.cover)
    sq = map_square(site, F, F)
    lift = unique_lift_2cell(site, F.cover, sq.pr_other, sq.pr_cover)
    cover_uv = K.comp1(t.square.pr_other, F.cover)
    L = unique_lift_2cell(site, cover_uv, T.q13, T.q23)
    pr1, pr2 = t.square.pr_other, t.square.pr_cover
    ch.step("pr1.L = lift.q12", K.lwhisk(pr1, L) == K.rwhisk(lift, T.q12))
    ch.step("pr2.L = identity", K.lwhisk(pr2, L) == K.id2(K.comp1(T.q13, pr2)))
    total = vcompose_maps(site, one, t)
    steps = [
        ("E0", precompose_maps(site, one, t)),
        ("E1", paste(K, K.lwhisk(F.arrow, K.rwhisk(lift, T.q12)), K.rwhisk(t.cell, T.q23))),
        ("E2", paste(K, K.lwhisk(K.comp1(pr1, F.arrow), L), K.rwhisk(t.cell, T.q23))),
        ("E3", paste(K, K.rwhisk(t.cell, T.q13), K.lwhisk(K.comp1(pr2, G.arrow), L))),
        ("E4", K.rwhisk(t.cell, T.q13)),
        ("E5", K.rwhisk(total.cell, T.q13)),
    ]
    ch.equal_chain(steps)
    ch.step("1 + t = t", total == t)
    return ch


# ---------------------------------------------------------------------------
# suites


def _timed(fn):
    def run(site, *args, **kwargs):
        t0 = time.perf_counter()
        res = fn(site, *args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _record_chain(res: SuiteResult, ch: ChainReplay, *witness) -> None:
    for label, holds in ch.steps:
        res.check(f"{ch.name}: {label}", holds, *witness)


@_timed
def suite_category_axioms(site: Site, scope: Scope = Scope(), *, seed: int = 0) -> SuiteResult:
    """Unit and associativity of ``+`` on every hom-category in scope, plus the
    laws around it: functoriality of ``iota``, the section shortcut and the
    search for a non-commuting pair of endomaps.
    """
    K = site.base
    res = SuiteResult("category-axioms", site.name)
    objs = scope.objs(site)
    trivial_covers = all(site.is_identity(j) for j in site.covers)
    witness = None
    for x, y in product(objs, repeat=2):
        H = build_hom_category(site, x, y, fractions=fractions_within(site, x, y, scope.apex))
        chk = H.axiom_check()
        for law, n in chk.checked.items():
            res.checked[law] += n
        for law, n in chk.derived.items():
            res.checked[f"{law} (derived)"] += n
        for law, n in chk.skipped.items():
            res.skip(law, n)
        for v in chk.violations:
            res.fail(v[0], x, y, *(fraction_name(K, w) if isinstance(w, Fraction) else w for w in v[1:]))
        res.skip("excluded-fraction", len(H.excluded))
        if trivial_covers:
            _check_iso_to_base(site, H, res)
        if H.closure is None:
            _check_sections(site, H, res)
            witness = witness or _noncommuting(site, H)
        _check_iota(site, H, res)
    if witness is not None:
        t1, t2 = witness
        res.notes["noncommutative"] = {"t1": map_name(K, t1), "t2": map_name(K, t2)}
    elif K.locally_thin():
        res.notes["noncommutative"] = "none: the 2-category is locally thin, so endomaps are identities"
    else:
        res.notes["noncommutative"] = "none found in scope"
    res.notes["scope"] = scope.as_dict()
    return res


def _check_iso_to_base(site: Site, H, res: SuiteResult) -> None:
    """With identity covers, ``K_J(x, y)`` is ``K(x, y)`` on the nose."""
    K = site.base
    homs = K.hom(H.x, H.y)
    res.check("iso-objects", sorted(map(K.name, (F.arrow for F in H.objects))) == sorted(map(K.name, homs)), H.x, H.y)
    cells = [a for f in homs for g in homs for a in K.cells_between(f, g)]
    res.check("iso-arrows", sorted(map(K.name, (t.cell for t in H.arrows))) == sorted(map(K.name, cells)), H.x, H.y)
    for (t1, t2), t in H.compose.items():
        res.check("iso-composition", t.cell == K.vcomp(t2.cell, t1.cell), map_name(K, t1), map_name(K, t2))


def _check_sections(site: Site, H, res: SuiteResult) -> None:
    """If ``q13`` has a section ``s``, ``t1 + t2`` is ``t1 (+) t2`` restricted along ``s``."""
    K = site.base
    sections: dict = {}
    for (t1, t2), trace in H.provenance.items():
        q = trace.along
        if q not in sections:
            sections[q] = section_of(site, q)
        s = sections[q]
        if s is None:
            continue
        res.check("section-shortcut", K.rwhisk(trace.oplus, s) == H.compose[t1, t2].cell, map_name(K, t1), map_name(K, t2))


def _noncommuting(site: Site, H):
    for (t1, t2), t in H.compose.items():
        if t1.source == t1.target == t2.source == t2.target:
            other = H.compose.get((t2, t1))
            if other is not None and other != t:
                return t1, t2
    return None


IOTA_RENAMING_LIMIT = 64


def _check_iota(site: Site, H, res: SuiteResult) -> None:
    """``iota(id) = 1`` and ``iota(r2 . r1) = iota(r1) + iota(r2)`` on renamings among the objects.

    Renamings are gathered per object pair up to ``IOTA_RENAMING_LIMIT``;
    the rest are counted as skipped.
    """
    K = site.base
    for F in H.objects:
        res.check("iota-identity", iota(site, identity_renaming(site, F)) == H.identity[F], fraction_name(K, F))
    ren: dict = {}
    objs = H.objects
    for F in objs:
        for G in objs:
            rs = renamings_between(site, F, G)
            if len(rs) > IOTA_RENAMING_LIMIT:
                res.skip("iota-renamings-over-limit", len(rs) - IOTA_RENAMING_LIMIT)
                rs = rs[:IOTA_RENAMING_LIMIT]
            if rs:
                ren[F, G] = rs
    by_src: dict = {}
    for (F, G), rs in ren.items():
        by_src.setdefault(F, []).append((G, rs))
    budget = 20_000
    for (F, G), rs1 in ren.items():
        for Hh, rs2 in by_src.get(G, ()):
            for r1 in rs1:
                for r2 in rs2:
                    if budget <= 0:
                        res.skip("iota-budget")
                        continue
                    budget -= 1
                    try:
                        lhs = iota(site, compose_renamings(site, r1, r2))
                        rhs = vcompose_maps(site, iota(site, r1), iota(site, r2))
                    except MissingPullback:
                        res.skip("iota-functorial")
                        continue
                    res.check("iota-functorial", lhs == rhs, fraction_name(K, F), fraction_name(K, Hh))


def _whisker_fractions(site: Site, scope: Scope):
    K = site.base
    objs = scope.objs(site)
    small = [w for w in objs if scope.whisker_apex is None or K.object_size(w) <= scope.whisker_apex]
    right = {y: [G for z in objs for G in fractions_within(site, y, z, scope.whisker_apex)] for y in objs}
    left = {x: [F for w in objs for F in fractions_within(site, w, x, scope.whisker_apex)] for x in objs}
    case_I = {x: case_I_fractions(site, x, small) for x in objs}
    case_II = {x: case_II_fractions(site, x, objs) for x in objs}
    return right, left, case_I, case_II


def _try(res: SuiteResult, law: str, thunk, *witness) -> None:
    try:
        holds = thunk()
    except MissingPullback:
        res.skip(law)
        return
    res.check(law, holds, *witness)


@_timed
def suite_whisker_functorial(site: Site, scope: Scope = Scope(), *, seed: int = 0) -> SuiteResult:
    """Right whiskering and left whiskering (cases I and II and general)
    preserve identity maps and ``+`` on every constructible instance in scope."""
    K = site.base
    res = SuiteResult("whisker-functorial", site.name)
    objs = scope.objs(site)
    right, left, case_I, case_II = _whisker_fractions(site, scope)
    kinds = (
        ("right", right, lambda F, t: right_whisker(site, t, F)),
        ("left-I", case_I, lambda F, t: left_whisker_I(site, F, t)),
        ("left-II", case_II, lambda F, t: left_whisker_II(site, F, t)),
        ("left", left, lambda F, t: left_whisker(site, F, t)),
    )

    def composite(kind, F, A):
        return compose_fractions(site, A, F) if kind == "right" else compose_fractions(site, F, A)

    for x, y in product(objs, repeat=2):
        for A in fractions_within(site, x, y, scope.apex):
            try:
                one = identity_map(site, A)
            except MissingPullback:
                res.skip("identity-without-self-pullback")
                continue
            for kind, table, whisk in kinds:
                for F in table[y if kind == "right" else x]:
                    _try(
                        res,
                        f"{kind}: identity",
                        lambda: whisk(F, one) == identity_map(site, composite(kind, F, A)),
                        fraction_name(K, A),
                        fraction_name(K, F),
                    )
        for a1, a2 in composable_pairs(site, x, y, scope.apex, res):
            a12 = vcompose_maps(site, a1, a2)
            for kind, table, whisk in kinds:
                for F in table[y if kind == "right" else x]:
                    _try(
                        res,
                        f"{kind}: preserves +",
                        lambda: whisk(F, a12) == vcompose_maps(site, whisk(F, a1), whisk(F, a2)),
                        map_name(K, a1),
                        map_name(K, a2),
                        fraction_name(K, F),
                    )
    res.notes["scope"] = scope.as_dict()
    return res


@_timed
def suite_appendix(site: Site, scope: Scope = Scope(), *, seed: int = 0) -> SuiteResult:
    """Replay the functoriality derivations for right whiskering and both left
    whiskering cases, and the unit-law derivation, on every constructible
    instance in scope."""
    K = site.base
    res = SuiteResult("appendix", site.name)
    objs = scope.objs(site)
    right, _, case_I, case_II = _whisker_fractions(site, scope)
    replayed = {"right-whisker": 0, "left-whisker-I": 0, "left-whisker-II": 0, "left-unit": 0}

    def run(kind, thunk, *witness):
        try:
            ch = thunk()
        except MissingPullback:
            res.skip(kind)
            return
        replayed[kind] += 1
        _record_chain(res, ch, *witness)

    for x, y in product(objs, repeat=2):
        for a1, a2 in composable_pairs(site, x, y, scope.apex, res):
            w = (map_name(K, a1), map_name(K, a2))
            for G in right[y]:
                run("right-whisker", lambda: replay_right_whisker_chain(site, a1, a2, G), *w, fraction_name(K, G))
            for F in case_I[x]:
                run("left-whisker-I", lambda: replay_case_I_chain(site, F, a1, a2), *w, fraction_name(K, F))
            for F in case_II[x]:
                run("left-whisker-II", lambda: replay_case_II_chain(site, F, a1, a2), *w, fraction_name(K, F))
        for t in all_maps(site, x, y, scope.apex):
            run("left-unit", lambda: replay_unit_chain(site, t), map_name(K, t))
    res.notes["replayed"] = replayed
    res.notes["scope"] = scope.as_dict()
    return res


@_timed
def suite_interchange(site: Site, scope: Scope = Scope(), *, seed: int = 0) -> SuiteResult:
    """Both whiskering orders give the same horizontal composite, for every
    pair of maps ``a`` in ``K_J(x, y)`` and ``b`` in ``K_J(y, z)`` in scope."""
    K = site.base
    res = SuiteResult("interchange", site.name)
    objs = scope.objs(site)
    maps = {(x, y): all_maps(site, x, y, scope.apex) for x, y in product(objs, repeat=2)}
    for x, y, z in product(objs, repeat=3):
        for a in maps[x, y]:
            for b in maps[y, z]:
                try:
                    first = vcompose_maps(site, left_whisker(site, a.source, b), right_whisker(site, a, b.target))
                    other = vcompose_maps(site, right_whisker(site, a, b.source), left_whisker(site, a.target, b))
                except MissingPullback:
                    res.skip("interchange")
                    continue
                res.check("interchange", first == other, map_name(K, a), map_name(K, b))
    res.notes["scope"] = scope.as_dict()
    return res


NATURALITY_SAMPLES = 200


@_timed
def suite_pentagon(site: Site, scope: Scope = Scope(), *, seed: int = 0) -> SuiteResult:
    """Strict unitality, the pentagon on every constructible 4-tuple in scope,
    and associator naturality on a seeded sample of map triples."""
    K = site.base
    res = SuiteResult("pentagon", site.name)
    objs = scope.objs(site)
    fr = {(x, y): fractions_within(site, x, y, scope.apex) for x, y in product(objs, repeat=2)}
    for (x, y), fs in fr.items():
        ix, iy = identity_fraction(site, x), identity_fraction(site, y)
        for F in fs:
            res.check("unit-left", compose_fractions(site, ix, F) == F, fraction_name(K, F))
            res.check("unit-right", compose_fractions(site, F, iy) == F, fraction_name(K, F))
    for F1, F2 in _chains(site, fr, objs, 2):
        for slots in ((None, F1, F2), (F1, None, F2), (F1, F2, None)):
            trip = _fill_identity(site, slots)
            try:
                A = associator(site, *trip)
                ok = A.source == A.target and A == identity_map(site, A.source)
            except MissingPullback:
                res.skip("associator-unit")
                continue
            res.check("associator-unit", ok, *(fraction_name(K, F) for F in trip))
    for F1, F2, F3, F4 in _chains(site, fr, objs, 4):
        try:
            ok = pentagon_holds(site, F1, F2, F3, F4)
        except MissingPullback:
            res.skip("pentagon")
            continue
        res.check("pentagon", ok, *(fraction_name(K, F) for F in (F1, F2, F3, F4)))
    _associator_naturality(site, scope, objs, res, seed)
    res.notes["scope"] = scope.as_dict()
    return res


def _fill_identity(site: Site, slots):
    filled = list(slots)
    for i, F in enumerate(slots):
        if F is None:
            nb = slots[i + 1] if i + 1 < len(slots) and slots[i + 1] is not None else None
            obj = nb.src if nb is not None else slots[i - 1].tgt
            filled[i] = identity_fraction(site, obj)
    return filled


def _chains(site: Site, fr, objs, n):
    """Sequences of ``n`` composable fractions whose iterated composites exist."""

    def extend(prefix, composite, x):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for y in objs:
            for F in fr[x, y]:
                if composite is None:
                    yield from extend([F], F, y)
                    continue
                try:
                    c = compose_fractions(site, composite, F)
                except MissingPullback:
                    continue
                yield from extend(prefix + [F], c, y)

    for x in objs:
        yield from extend([], None, x)


def pentagon_holds(site: Site, F1, F2, F3, F4) -> bool:
    F12, F23, F34 = (compose_fractions(site, *p) for p in ((F1, F2), (F2, F3), (F3, F4)))
    lhs = vcompose_maps(site, associator(site, F12, F3, F4), associator(site, F1, F2, F34))
    rhs = vcompose_maps(
        site,
        vcompose_maps(site, right_whisker(site, associator(site, F1, F2, F3), F4), associator(site, F1, F23, F4)),
        left_whisker(site, F1, associator(site, F2, F3, F4)),
    )
    return lhs == rhs


def _associator_naturality(site: Site, scope: Scope, objs, res: SuiteResult, seed: int) -> None:
    K = site.base
    rng = random.Random(seed)
    maps = {(x, y): all_maps(site, x, y, scope.apex) for x, y in product(objs, repeat=2)}
    paths = [
        (x, y, z, w)
        for x, y, z, w in product(objs, repeat=4)
        if maps[x, y] and maps[y, z] and maps[z, w]
    ]
    if not paths:
        return
    for _ in range(NATURALITY_SAMPLES):
        x, y, z, w = rng.choice(paths)
        t1, t2, t3 = rng.choice(maps[x, y]), rng.choice(maps[y, z]), rng.choice(maps[z, w])
        try:
            left = hcompose_maps(site, hcompose_maps(site, t1, t2), t3)
            right = hcompose_maps(site, t1, hcompose_maps(site, t2, t3))
            a_src = associator(site, t1.source, t2.source, t3.source)
            a_tgt = associator(site, t1.target, t2.target, t3.target)
            ok = vcompose_maps(site, left, a_tgt) == vcompose_maps(site, a_src, right)
        except (MissingPullback, InterchangeViolation) as exc:
            if isinstance(exc, InterchangeViolation):
                res.fail("associator-naturality", "interchange violated", map_name(K, t1))
            else:
                res.skip("associator-naturality")
            continue
        res.check("associator-naturality", ok, map_name(K, t1), map_name(K, t2), map_name(K, t3))
