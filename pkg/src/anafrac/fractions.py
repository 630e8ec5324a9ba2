"""J-fractions, maps of fractions and the hom-categories of the localisation.

A fraction ``(j, f)`` from ``x`` to ``y`` is a span ``x <-j- u -f-> y`` with
``j`` a cover. A map ``(j, f) => (k, g)`` is a 2-cell ``f.pr1 => g.pr2`` on
the chosen pullback ``u x_x v`` (see :func:`anafrac.site.pair_square`; ``pr1``
lands in ``u``). Vertical composition ``t1 + t2`` (first ``t1``) pastes the two
cells on the triple pullback and descends along the projection to
``u1 x_x u3``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .site import (
    MissingPullback,
    NotACover,
    PullbackSquare,
    Site,
    descend_2cell,
    iterated_pullback,
    pair_square,
    pullback,
    projection,
    unique_lift_2cell,
)
from .twocat import FiniteCategory, TwoCatError


class FractionError(TwoCatError):
    """Malformed fraction, map or renaming."""


class _CachedHash:
    # these values are dict keys in hot loops; field-wise hashing is recursive
    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(tuple(getattr(self, n) for n in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True)
class Fraction(_CachedHash):
    src: object
    tgt: object
    apex: object
    cover: object
    arrow: object


@dataclass(frozen=True)
class FractionMap(_CachedHash):
    source: Fraction
    target: Fraction
    square: PullbackSquare
    cell: object


@dataclass(frozen=True)
class RenamingMap(_CachedHash):
    """A 1-cell ``r`` between apexes with ``k.r == j`` and ``a_r: f => g.r``."""

    source: Fraction
    target: Fraction
    r: object
    a_r: object


@dataclass(frozen=True)
class DescentTrace:
    """How one composite ``t1 + t2`` was obtained."""

    triple_apex: object
    along: object  # the projection u1 x u2 x u3 -> u1 x u3
    oplus: object  # the pasted cell on the triple apex
    result: object  # the descended cell
    along_is_cover: bool


# ---------------------------------------------------------------------------
# fractions


def make_fraction(site: Site, j, f) -> Fraction:
    K = site.base
    if not site.is_cover(j):
        raise NotACover(f"{K.name(j)} is not a cover")
    if K.src(j) != K.src(f):
        raise FractionError(f"{K.name(j)} and {K.name(f)} do not share a source")
    return Fraction(K.tgt(j), K.tgt(f), K.src(j), j, f)


def identity_fraction(site: Site, x) -> Fraction:
    i = site.base.id1(x)
    return Fraction(x, x, x, i, i)


def enumerate_fractions(site: Site, x, y) -> list[Fraction]:
    """All fractions from ``x`` to ``y``, ordered by cover then arrow."""
    K = site.base
    out = []
    for j in sorted((j for j in site.covers if K.tgt(j) == x), key=K.name):
        u = K.src(j)
        out.extend(Fraction(x, y, u, j, f) for f in K.hom(u, y))
    return out


def compose_fractions(site: Site, F1: Fraction, F2: Fraction) -> Fraction:
    """The composite span ``x <- u x_y v -> z`` (first ``F1``)."""
    K = site.base
    if F1.tgt != F2.src:
        raise FractionError("fractions are not composable")
    sq = pullback(site, F2.cover, F1.arrow)
    cover = K.comp1(sq.pr_other, F1.cover)
    if not site.is_cover(cover):
        raise NotACover(f"composite cover {K.name(cover)} is not in J")
    return Fraction(F1.src, F2.tgt, sq.apex, cover, K.comp1(sq.pr_cover, F2.arrow))


# ---------------------------------------------------------------------------
# maps of fractions


def map_square(site: Site, F: Fraction, G: Fraction) -> PullbackSquare:
    if (F.src, F.tgt) != (G.src, G.tgt):
        raise FractionError("fractions are not parallel")
    return pair_square(site, F.cover, G.cover)


def map_boundary(site: Site, F: Fraction, G: Fraction):
    """The 1-cells ``f.pr1`` and ``g.pr2`` a map ``F => G`` goes between."""
    K = site.base
    sq = map_square(site, F, G)
    return K.comp1(sq.pr_other, F.arrow), K.comp1(sq.pr_cover, G.arrow)


def make_map(site: Site, F: Fraction, G: Fraction, cell) -> FractionMap:
    K = site.base
    sq = map_square(site, F, G)
    s, t = K.comp1(sq.pr_other, F.arrow), K.comp1(sq.pr_cover, G.arrow)
    if not K.is_twocell(cell) or K.src1(cell) != s or K.tgt1(cell) != t:
        raise FractionError(f"{K.name(cell)} does not have boundary {K.name(s)} => {K.name(t)}")
    return FractionMap(F, G, sq, cell)


def maps_between(site: Site, F: Fraction, G: Fraction) -> list[FractionMap]:
    K = site.base
    sq = map_square(site, F, G)
    s, t = K.comp1(sq.pr_other, F.arrow), K.comp1(sq.pr_cover, G.arrow)
    return [FractionMap(F, G, sq, a) for a in K.cells_between(s, t)]


# ---------------------------------------------------------------------------
# renaming maps and iota


def make_renaming(site: Site, F: Fraction, G: Fraction, r, a_r) -> RenamingMap:
    K = site.base
    if K.src(r) != F.apex or K.tgt(r) != G.apex:
        raise FractionError("renaming 1-cell has the wrong boundary")
    if K.comp1(r, G.cover) != F.cover:
        raise FractionError("renaming does not commute with the covers")
    gr = K.comp1(r, G.arrow)
    if not K.is_twocell(a_r) or K.src1(a_r) != F.arrow or K.tgt1(a_r) != gr:
        raise FractionError("renaming 2-cell has the wrong boundary")
    return RenamingMap(F, G, r, a_r)


def identity_renaming(site: Site, F: Fraction) -> RenamingMap:
    K = site.base
    return RenamingMap(F, F, K.id1(F.apex), K.id2(F.arrow))


def renamings_between(site: Site, F: Fraction, G: Fraction) -> list[RenamingMap]:
    K = site.base
    out = []
    for r in K.hom(F.apex, G.apex):
        if K.comp1(r, G.cover) != F.cover:
            continue
        for a in K.cells_between(F.arrow, K.comp1(r, G.arrow)):
            out.append(RenamingMap(F, G, r, a))
    return out


def compose_renamings(site: Site, r1: RenamingMap, r2: RenamingMap) -> RenamingMap:
    """First ``r1`` then ``r2``."""
    K = site.base
    if r1.target != r2.source:
        raise FractionError("renamings are not composable")
    a = K.vcomp(K.rwhisk(r2.a_r, r1.r), r1.a_r)
    return RenamingMap(r1.source, r2.target, K.comp1(r1.r, r2.r), a)


def iota(site: Site, r: RenamingMap) -> FractionMap:
    """The map of fractions induced by a renaming map.

    On ``u x_x v`` the cell is ``a_r`` whiskered by ``pr1``, followed by ``g``
    postcomposed with the canonical lift ``r.pr1 => pr2`` through ``k`` of the
    identity on ``j.pr1 == k.pr2``.
    """
    K = site.base
    F, G = r.source, r.target
    sq = map_square(site, F, G)
    pr1, pr2 = sq.pr_other, sq.pr_cover
    lift = unique_lift_2cell(site, G.cover, K.comp1(pr1, r.r), pr2)
    cell = K.vcomp(K.lwhisk(G.arrow, lift), K.rwhisk(r.a_r, pr1))
    return FractionMap(F, G, sq, cell)


def identity_map(site: Site, F: Fraction) -> FractionMap:
    return iota(site, identity_renaming(site, F))


# ---------------------------------------------------------------------------
# vertical composition


@dataclass(frozen=True)
class TripleData:
    """The triple pullback ``u1 x u2 x u3`` with its comparison maps."""

    apex: object
    q12: object
    q23: object
    q13: object
    sq12: PullbackSquare
    sq23: PullbackSquare
    sq13: PullbackSquare


def triple_data(site: Site, j1, j2, j3) -> TripleData:
    key = ("triple", j1, j2, j3)
    cache = site._iter_cache
    if key in cache:
        return cache[key]
    it = iterated_pullback(site, (j1, j2, j3))
    out = TripleData(
        it.apex,
        projection(site, it, (0, 1)),
        projection(site, it, (1, 2)),
        projection(site, it, (0, 2)),
        pair_square(site, j1, j2),
        pair_square(site, j2, j3),
        pair_square(site, j1, j3),
    )
    cache[key] = out
    return out


def _check_composable(t1: FractionMap, t2: FractionMap) -> None:
    if t1.target != t2.source:
        raise FractionError("maps of fractions are not composable")


def precompose_maps(site: Site, t1: FractionMap, t2: FractionMap):
    """The pasted cell ``t1 (+) t2`` on the triple pullback."""
    _check_composable(t1, t2)
    K = site.base
    T = triple_data(site, t1.source.cover, t1.target.cover, t2.target.cover)
    return K.vcomp(K.rwhisk(t2.cell, T.q23), K.rwhisk(t1.cell, T.q12))


def vcompose_with_trace(site: Site, t1: FractionMap, t2: FractionMap):
    _check_composable(t1, t2)
    K = site.base
    F1, F3 = t1.source, t2.target
    T = triple_data(site, F1.cover, t1.target.cover, F3.cover)
    oplus = K.vcomp(K.rwhisk(t2.cell, T.q23), K.rwhisk(t1.cell, T.q12))
    s = K.comp1(T.sq13.pr_other, F1.arrow)
    t = K.comp1(T.sq13.pr_cover, F3.arrow)
    cell = descend_2cell(site, T.q13, s, t, oplus)
    trace = DescentTrace(T.apex, T.q13, oplus, cell, site.is_cover(T.q13))
    return FractionMap(F1, F3, T.sq13, cell), trace


def vcompose_maps(site: Site, t1: FractionMap, t2: FractionMap) -> FractionMap:
    """``t1 + t2``: first ``t1``, then ``t2``."""
    return vcompose_with_trace(site, t1, t2)[0]


def section_of(site: Site, p) -> Optional[object]:
    """Some ``s`` with ``p.s == id``, if one exists."""
    K = site.base
    ident = K.id1(K.tgt(p))
    for s in K.hom(K.tgt(p), K.src(p)):
        if K.comp1(s, p) == ident:
            return s
    return None


# ---------------------------------------------------------------------------
# hom-categories


@dataclass
class AxiomCheck:
    violations: list = field(default_factory=list)
    checked: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    derived: dict = field(default_factory=dict)  # instances settled by thinness

    @property
    def ok(self) -> bool:
        return not self.violations


GENERIC_PAIR_BUDGET = 100_000
FAILURE_LIMIT = 25


@dataclass
class ThinClosure:
    """Certificate that ``+`` is total on a hom-category of a locally thin ``K``.

    When every parallel pair in ``K`` has at most one 2-cell, a map of
    fractions is determined by its endpoints and ``t1 + t2`` exists exactly
    when the paste-then-descend construction succeeds, which for each cover
    triple reduces to the comparison maps commuting plus a 2-cell existing on
    ``u1 x_x u3``.
    """

    composable: int = 0  # composable pairs whose composite was certified
    undefined: int = 0  # composable pairs lacking a triple pullback
    triples: int = 0  # composable triples of maps
    failures: list = field(default_factory=list)  # (F1, F2, F3) with no composite
    failure_count: int = 0
    undefined_covers: list = field(default_factory=list)
    structural: list = field(default_factory=list)  # cover triples failing comparison

    @property
    def ok(self) -> bool:
        return not self.failure_count and not self.structural


@dataclass
class HomCategory:
    """The category ``K_J(x, y)`` on the fractions whose maps could be built.

    ``compose[(t1, t2)]`` is ``t1 + t2``. Fractions lacking a self-pullback
    are listed in ``excluded``; composable pairs lacking a triple pullback in
    ``undefined``. ``provenance`` records the descent behind each composite.
    Large locally thin hom-categories carry a :class:`ThinClosure` instead of
    an explicit composition table.
    """

    x: object
    y: object
    objects: list
    arrows: list
    identity: dict
    compose: dict
    provenance: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)
    undefined: list = field(default_factory=list)
    closure: Optional[ThinClosure] = None
    site: Optional[Site] = field(default=None, repr=False, compare=False)

    def hom(self, F, G) -> list:
        return [t for t in self.arrows if t.source == F and t.target == G]

    def composite(self, t1: FractionMap, t2: FractionMap) -> FractionMap:
        if (t1, t2) in self.compose:
            return self.compose[t1, t2]
        if self.site is None:
            raise KeyError("composite not tabulated")
        return vcompose_maps(self.site, t1, t2)

    def as_finite_category(self) -> FiniteCategory:
        return FiniteCategory(
            self.objects,
            self.arrows,
            {t: t.source for t in self.arrows},
            {t: t.target for t in self.arrows},
            self.identity,
            self.compose,
            provenance=self.provenance,
        )

    def axiom_check(self) -> "AxiomCheck":
        """Unit and associativity laws on every instance whose composites exist."""
        res = AxiomCheck()
        comp = self.compose
        for F in self.objects:
            i = self.identity.get(F)
            if i is None or i.source != F or i.target != F:
                res.violations.append(("identity", F))
        if self.closure is not None:
            return self._thin_check(res)
        by_src: dict = {}
        for t in self.arrows:
            by_src.setdefault(t.source, []).append(t)
        for (a, b), c in comp.items():
            res.checked["typing"] += 1
            if c.source != a.source or c.target != b.target:
                res.violations.append(("typing", a, b))
        if res.violations:
            return res
        for a in self.arrows:
            for law, key in (
                ("left-unit", (self.identity[a.source], a)),
                ("right-unit", (a, self.identity[a.target])),
            ):
                if key not in comp:
                    res.skipped[law] += 1
                elif comp[key] != a:
                    res.violations.append((law, a))
                else:
                    res.checked[law] += 1
            for b in by_src.get(a.target, ()):
                ab = comp.get((a, b))
                for c in by_src.get(b.target, ()):
                    bc = comp.get((b, c))
                    if ab is None or bc is None or (ab, c) not in comp or (a, bc) not in comp:
                        res.skipped["assoc"] += 1
                        continue
                    res.checked["assoc"] += 1
                    if comp[ab, c] != comp[a, bc]:
                        res.violations.append(("assoc", a, b, c))
        return res

    def _thin_check(self, res: "AxiomCheck") -> "AxiomCheck":
        cl = self.closure
        seen = Counter((t.source, t.target) for t in self.arrows)
        for key, n in seen.items():
            res.checked["thin"] += 1
            if n > 1:
                res.violations.append(("thin", *key))
        res.checked["closure"] = cl.composable
        res.skipped["closure"] = cl.undefined
        res.violations.extend(("closure", *f) for f in cl.failures)
        res.violations.extend(("comparison", *c) for c in cl.structural)
        if cl.failure_count > len(cl.failures):
            res.violations.append(("closure", f"{cl.failure_count - len(cl.failures)} more"))
        if not res.violations and not cl.undefined:
            # hom-sets have at most one element and composition is total, so
            # both sides of every unit and associativity instance coincide
            res.derived["left-unit"] = res.derived["right-unit"] = len(self.arrows)
            res.derived["assoc"] = cl.triples
        return res

    def axiom_violations(self) -> list:
        return self.axiom_check().violations

    @property
    def complete(self) -> bool:
        undefined = self.closure.undefined if self.closure is not None else len(self.undefined)
        return not self.excluded and not undefined


def _comparison_commutes(K, T: TripleData) -> bool:
    """The identities that make the pasted cell well typed and descend along q13."""
    return (
        K.comp1(T.q12, T.sq12.pr_cover) == K.comp1(T.q23, T.sq23.pr_other)
        and K.comp1(T.q13, T.sq13.pr_other) == K.comp1(T.q12, T.sq12.pr_other)
        and K.comp1(T.q13, T.sq13.pr_cover) == K.comp1(T.q23, T.sq23.pr_cover)
    )


def thin_closure(site: Site, objects, *, strict: bool = False) -> ThinClosure:
    """Certify that every composable pair of maps among ``objects`` composes."""
    K = site.base
    if not K.locally_thin():
        raise FractionError("thin closure needs a locally thin 2-category")
    groups: dict = {}
    for F in objects:
        groups.setdefault(F.cover, []).append(F)
    covers = list(groups)
    exists: dict = {}
    for ja in covers:
        for jb in covers:
            try:
                sq = pair_square(site, ja, jb)
            except MissingPullback:
                exists[ja, jb] = None
                continue
            s = [K.comp1(sq.pr_other, F.arrow) for F in groups[ja]]
            t = [K.comp1(sq.pr_cover, G.arrow) for G in groups[jb]]
            exists[ja, jb] = np.array(
                [[bool(K.cells_between(a, b)) for b in t] for a in s], dtype=bool
            ).reshape(len(s), len(t))
    cl = ThinClosure()
    for ja, jb, jc in product(covers, repeat=3):
        A12, A23 = exists[ja, jb], exists[jb, jc]
        if A12 is None or A23 is None:
            continue
        pairs = A12[:, :, None] & A23[None, :, :]
        n = int(pairs.sum())
        if not n:
            continue
        try:
            T = triple_data(site, ja, jb, jc)
        except MissingPullback as exc:
            if strict:
                raise MissingPullback(f"covers ({K.name(ja)}, {K.name(jb)}, {K.name(jc)}): {exc}") from None
            cl.undefined += n
            cl.undefined_covers.append((ja, jb, jc))
            continue
        if not _comparison_commutes(K, T):
            cl.structural.append((ja, jb, jc))
            continue
        bad = pairs & ~exists[ja, jc][:, None, :]
        nbad = int(bad.sum())
        cl.composable += n - nbad
        cl.failure_count += nbad
        for a, b, c in np.argwhere(bad)[: max(0, FAILURE_LIMIT - len(cl.failures))]:
            cl.failures.append((groups[ja][a], groups[jb][b], groups[jc][c]))
    # composable triples of maps, for reporting the derived associativity count
    index = {F: i for i, F in enumerate(objects)}
    M = np.zeros((len(objects), len(objects)), dtype=np.int64)
    for (ja, jb), A in exists.items():
        if A is None:
            continue
        rows = [index[F] for F in groups[ja]]
        cols = [index[G] for G in groups[jb]]
        M[np.ix_(rows, cols)] = A
    cl.triples = int(np.ones(len(objects), dtype=np.int64) @ M @ M @ M.sum(axis=1)) if len(objects) else 0
    return cl


def build_hom_category(
    site: Site, x, y, *, fractions=None, strict: bool = False, engine: str = "auto"
) -> HomCategory:
    """Materialize ``K_J(x, y)``.

    With ``strict`` any missing pullback raises :class:`MissingPullback`
    naming the offending fractions; otherwise the category is built on what
    the pullback assignment supports and the gaps are recorded. ``engine`` is
    ``"generic"`` (every composite tabulated with its provenance), ``"thin"``
    (a :class:`ThinClosure` certificate) or ``"auto"``, which picks ``thin``
    for locally thin carriers with more than ``GENERIC_PAIR_BUDGET``
    composable pairs.
    """
    K = site.base
    cands = enumerate_fractions(site, x, y) if fractions is None else list(fractions)
    objects, excluded, identity = [], [], {}
    for F in cands:
        try:
            identity[F] = identity_map(site, F)
        except MissingPullback as exc:
            if strict:
                raise MissingPullback(f"identity on {fraction_name(K, F)}: {exc}") from None
            excluded.append(F)
            continue
        objects.append(F)
    arrows, out_of = [], {F: [] for F in objects}
    for F in objects:
        for G in objects:
            try:
                ts = maps_between(site, F, G)
            except MissingPullback as exc:
                if strict:
                    raise MissingPullback(
                        f"pair ({fraction_name(K, F)}, {fraction_name(K, G)}): {exc}"
                    ) from None
                continue
            arrows.extend(ts)
            out_of[F].extend(ts)
    if engine == "auto":
        pairs = sum(len(out_of[t.target]) for t in arrows)
        engine = "thin" if pairs > GENERIC_PAIR_BUDGET and K.locally_thin() else "generic"
    if engine == "thin":
        closure = thin_closure(site, objects, strict=strict)
        return HomCategory(
            x, y, objects, arrows, identity, {}, excluded=excluded, closure=closure, site=site
        )
    if engine != "generic":
        raise ValueError(f"unknown engine {engine!r}")
    compose, provenance, undefined = {}, {}, []
    for t1 in arrows:
        for t2 in out_of[t1.target]:
            try:
                t, trace = vcompose_with_trace(site, t1, t2)
            except MissingPullback as exc:
                if strict:
                    raise MissingPullback(
                        f"triple ({fraction_name(K, t1.source)}, {fraction_name(K, t1.target)}, "
                        f"{fraction_name(K, t2.target)}): {exc}"
                    ) from None
                undefined.append((t1, t2))
                continue
            compose[t1, t2] = t
            provenance[t1, t2] = trace
    return HomCategory(
        x, y, objects, arrows, identity, compose, provenance, excluded, undefined, site=site
    )


def fraction_name(K, F: Fraction) -> str:
    return f"({K.name(F.cover)}, {K.name(F.arrow)})"


def map_name(K, t: FractionMap) -> str:
    return f"{fraction_name(K, t.source)} => {fraction_name(K, t.target)} by {K.name(t.cell)}"
