"""Covers, chosen strict pullbacks, unique lifts and descent of 2-cells.

Every "there is a unique ..." is realized as an exhaustive search followed by
a cardinality check; a count other than one is always its own error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping

from .twocat import (
    FiniteCategory,
    TwoCategory,
    TwoCatError,
    ValidationReport,
)


class MissingPullback(TwoCatError):
    def __init__(self, msg: str, stage: int | None = None):
        super().__init__(msg)
        self.stage = stage


class NotACover(TwoCatError):
    pass


class NotFF(TwoCatError):
    pass


class NoLift(TwoCatError):
    pass


class MultipleLifts(TwoCatError):
    pass


class NoMediator(TwoCatError):
    pass


class MultipleMediators(TwoCatError):
    pass


class NoDescent(TwoCatError):
    pass


class MultipleDescents(TwoCatError):
    pass


@dataclass(frozen=True)
class PullbackSquare:
    """``other . pr_other == cover . pr_cover`` with apex ``other_dom x_X cover_dom``."""

    cover: object
    other: object
    apex: object
    pr_other: object
    pr_cover: object


class Site:
    """A 2-category with a class of covers and a partial pullback assignment.

    ``pullbacks`` is either a mapping ``(cover, other) -> PullbackSquare`` or
    a callable returning a square or ``None``.
    """

    def __init__(
        self,
        base: TwoCategory,
        covers,
        pullbacks: Mapping | Callable,
        name: str = "site",
    ):
        self.base = base
        self.covers = frozenset(covers)
        self._pullbacks = pullbacks
        self.name = name
        self._pb_cache: dict = {}
        self._ff_cache: dict = {}
        self._med_cache: dict = {}
        self._iter_cache: dict = {}

    @property
    def K(self) -> TwoCategory:
        return self.base

    def is_cover(self, j) -> bool:
        return j in self.covers

    def is_identity(self, f) -> bool:
        K = self.base
        return K.src(f) == K.tgt(f) and K.id1(K.src(f)) == f

    def assigned(self, j, f) -> PullbackSquare | None:
        """Raw assignment lookup, no normalization and no cover check."""
        key = (j, f)
        if key in self._pb_cache:
            return self._pb_cache[key]
        if callable(self._pullbacks):
            sq = self._pullbacks(j, f)
        else:
            sq = self._pullbacks.get(key)
        self._pb_cache[key] = sq
        return sq

    def assigned_squares(self):
        if callable(self._pullbacks):
            K = self.base
            for j in sorted(self.covers, key=K.name):
                x = K.tgt(j)
                for b in K.objects:
                    for f in K.hom(b, x):
                        sq = self.assigned(j, f)
                        if sq is not None:
                            yield sq
        else:
            yield from self._pullbacks.values()


# ---------------------------------------------------------------------------
# ff arrows and lifts


def is_ff(site: Site | TwoCategory, f) -> bool:
    """Exhaustive check that ``f`` is representably fully faithful."""
    K = site.base if isinstance(site, Site) else site
    cache = site._ff_cache if isinstance(site, Site) else {}
    if f in cache:
        return cache[f]
    hint = getattr(K, "ff_hint", None)
    if hint is not None and hint(f) is not None:
        cache[f] = hint(f)
        return cache[f]
    x = K.src(f)
    ok = True
    for w in K.objects:
        homwx = K.hom(w, x)
        post = {g: K.comp1(g, f) for g in homwx}
        for g in homwx:
            for h in homwx:
                lifts: dict = {}
                for a in K.cells_between(g, h):
                    fa = K.lwhisk(f, a)
                    lifts[fa] = lifts.get(fa, 0) + 1
                targets = K.cells_between(post[g], post[h])
                if len(lifts) != len(targets) or any(lifts.get(t) != 1 for t in targets):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            break
    cache[f] = ok
    return ok


def lift_2cell(K: TwoCategory, j, k, l, cell):
    """The unique ``a: k => l`` whose postcomposite with ``j`` is ``cell``."""
    found = [a for a in K.cells_between(k, l) if K.lwhisk(j, a) == cell]
    if not found:
        raise NoLift(f"no lift of {K.name(cell)} through {K.name(j)}")
    if len(found) > 1:
        raise MultipleLifts(f"{len(found)} lifts of {K.name(cell)} through {K.name(j)}")
    return found[0]


def unique_lift_2cell(site: Site, j, k, l):
    """The unique 2-cell ``k => l`` covering the identity on ``j.k == j.l``."""
    K = site.base
    if not is_ff(site, j):
        raise NotFF(f"{K.name(j)} is not ff")
    jk = K.comp1(k, j)
    if jk != K.comp1(l, j):
        raise NoLift(f"{K.name(k)} and {K.name(l)} are not lifts of the same arrow")
    return lift_2cell(K, j, k, l, K.id2(jk))


# ---------------------------------------------------------------------------
# pullbacks


def pullback(site: Site, j, f) -> PullbackSquare:
    """The chosen pullback of the cover ``j`` along ``f``."""
    K = site.base
    if not site.is_cover(j):
        raise NotACover(f"{K.name(j)} is not a cover")
    if K.tgt(f) != K.tgt(j):
        raise MissingPullback(f"{K.name(f)} and {K.name(j)} do not share a target")
    if site.is_identity(j):
        b = K.src(f)
        return PullbackSquare(j, f, b, K.id1(b), f)
    if site.is_identity(f):
        u = K.src(j)
        return PullbackSquare(j, f, u, j, K.id1(u))
    sq = site.assigned(j, f)
    if sq is None:
        raise MissingPullback(f"no pullback of {K.name(j)} along {K.name(f)}")
    return sq


def induced_arrow(site: Site, square: PullbackSquare, cone_other, cone_cover):
    """The unique mediating 1-cell into the apex of ``square``."""
    key = (square, cone_other, cone_cover)
    if key in site._med_cache:
        return site._med_cache[key]
    K = site.base
    w = K.src(cone_other)
    if K.comp1(cone_other, square.other) != K.comp1(cone_cover, square.cover):
        raise NoMediator("cone does not commute")
    found = [
        m
        for m in K.hom(w, square.apex)
        if K.comp1(m, square.pr_other) == cone_other and K.comp1(m, square.pr_cover) == cone_cover
    ]
    if not found:
        raise NoMediator(f"no mediator into {square.apex}")
    if len(found) > 1:
        raise MultipleMediators(f"{len(found)} mediators into {square.apex}")
    site._med_cache[key] = found[0]
    return found[0]


def pair_square(site: Site, j, k) -> PullbackSquare:
    """``u x_X v`` for covers ``j: u -> X`` and ``k: v -> X``.

    Convention: ``pr_other`` lands in ``u`` (first factor), ``pr_cover`` in ``v``.
    """
    return pullback(site, k, j)


@dataclass
class IteratedPullback:
    """Left-bracketed ``u1 x_X u2 x_X ... x_X un`` with its projections."""

    covers: tuple
    apex: object
    pr: tuple  # apex -> u_i
    cover_map: object  # apex -> X
    stages: tuple  # the binary squares used
    _pair: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.covers)


def iterated_pullback(site: Site, covers) -> IteratedPullback:
    covers = tuple(covers)
    if covers in site._iter_cache:
        return site._iter_cache[covers]
    K = site.base
    x = K.tgt(covers[0])
    for j in covers:
        if K.tgt(j) != x:
            raise MissingPullback("covers do not share a target")
    apex = K.src(covers[0])
    prs = [K.id1(apex)]
    stages = []
    for n, j in enumerate(covers[1:], start=1):
        anchor = K.comp1(prs[0], covers[0])
        try:
            sq = pullback(site, j, anchor)
        except MissingPullback as exc:
            raise MissingPullback(f"stage {n}: {exc}", stage=n) from None
        stages.append(sq)
        prs = [K.comp1(sq.pr_other, p) for p in prs] + [sq.pr_cover]
        apex = sq.apex
    it = IteratedPullback(covers, apex, tuple(prs), K.comp1(prs[0], covers[0]), tuple(stages))
    site._iter_cache[covers] = it
    return it


def projection(site: Site, it: IteratedPullback, idx: tuple):
    """Canonical map from the iterated apex to the sub-product on ``idx``."""
    if idx in it._pair:
        return it._pair[idx]
    if len(idx) == 1:
        out = it.pr[idx[0]]
    else:
        sub = iterated_pullback(site, [it.covers[i] for i in idx])
        out = _mediate_iterated(site, sub, [it.pr[i] for i in idx])
    it._pair[idx] = out
    return out


def _mediate_iterated(site: Site, it: IteratedPullback, legs):
    """Map into a left-bracketed iterated apex from compatible legs."""
    m = legs[0]
    for sq, leg in zip(it.stages, legs[1:]):
        m = induced_arrow(site, sq, m, leg)
    return m


def mediate(site: Site, covers, legs):
    """Map into the iterated pullback of ``covers`` with components ``legs``."""
    return _mediate_iterated(site, iterated_pullback(site, covers), list(legs))


# ---------------------------------------------------------------------------
# strict 2-regularity and descent


def _precomposition_ff(K: TwoCategory, j, y) -> bool:
    x = K.tgt(j)
    homxy = K.hom(x, y)
    for f in homxy:
        fj = K.comp1(j, f)
        for g in homxy:
            gj = K.comp1(j, g)
            image = [K.rwhisk(a, j) for a in K.cells_between(f, g)]
            if len(set(image)) != len(image) or set(image) != set(K.cells_between(fj, gj)):
                return False
    return True


def strict_2_regularity(site: Site, j) -> tuple[bool, str]:
    """Decide strict 2-regularity; returns ``(result, method)``.

    For ff arrows precomposition is tested for full faithfulness ("shortcut");
    otherwise the raw definition with the descent side condition is used,
    which needs an assigned kernel pair.
    """
    K = site.base
    if is_ff(site, j):
        return all(_precomposition_ff(K, j, y) for y in K.objects), "shortcut"
    sq = site.assigned(j, j)
    if sq is None and site.is_cover(j):
        sq = pullback(site, j, j)
    if sq is None:
        raise MissingPullback(f"kernel pair of {K.name(j)} is not assigned")
    pr1, pr2 = sq.pr_other, sq.pr_cover
    x = K.tgt(j)
    for y in K.objects:
        homxy = K.hom(x, y)
        for f, g in product(homxy, repeat=2):
            fj, gj = K.comp1(j, f), K.comp1(j, g)
            for at in K.cells_between(fj, gj):
                if K.rwhisk(at, pr1) != K.rwhisk(at, pr2):
                    continue
                n = sum(1 for a in K.cells_between(f, g) if K.rwhisk(a, j) == at)
                if n != 1:
                    return False, "raw"
    return True, "raw"


def is_strictly_2_regular(site: Site, j) -> bool:
    return strict_2_regularity(site, j)[0]


def descend_2cell(site: Site | TwoCategory, j, f, g, cell):
    """The unique ``a: f => g`` with ``a * j == cell``."""
    K = site.base if isinstance(site, Site) else site
    found = [a for a in K.cells_between(f, g) if K.rwhisk(a, j) == cell]
    if not found:
        raise NoDescent(f"{K.name(cell)} does not descend along {K.name(j)}")
    if len(found) > 1:
        raise MultipleDescents(f"{len(found)} descents of {K.name(cell)} along {K.name(j)}")
    return found[0]


@dataclass
class StrDesc:
    category: FiniteCategory
    precomposition_fully_faithful: bool


def str_desc(site: Site, j, y) -> StrDesc:
    """Strict descent data along ``j`` with values in ``y``."""
    K = site.base
    u, x = K.src(j), K.tgt(j)
    sq = pair_square(site, j, j)
    pr1, pr2 = sq.pr_other, sq.pr_cover
    objs = [f for f in K.hom(u, y) if K.comp1(pr1, f) == K.comp1(pr2, f)]
    arrows, dom, cod = [], {}, {}
    for f in objs:
        for g in objs:
            for a in K.cells_between(f, g):
                if K.rwhisk(a, pr1) == K.rwhisk(a, pr2):
                    arrows.append(a)
                    dom[a], cod[a] = f, g
    compose = {(a, b): K.vcomp(b, a) for a in arrows for b in arrows if cod[a] == dom[b]}
    cat = FiniteCategory(objs, arrows, dom, cod, {f: K.id2(f) for f in objs}, compose)
    arrow_set = set(arrows)
    ff = True
    homxy = K.hom(x, y)
    for f in homxy:
        for g in homxy:
            fj, gj = K.comp1(j, f), K.comp1(j, g)
            image = [K.rwhisk(a, j) for a in K.cells_between(f, g)]
            target = {a for a in arrow_set if dom[a] == fj and cod[a] == gj}
            if len(set(image)) != len(image) or set(image) != target:
                ff = False
    return StrDesc(cat, ff)


# ---------------------------------------------------------------------------
# validation


def _check_square(site: Site, sq: PullbackSquare, rep: ValidationReport) -> None:
    K = site.base
    u, b, x = K.src(sq.cover), K.src(sq.other), K.tgt(sq.cover)
    rep.count("pullback-commutes")
    if (
        K.src(sq.pr_other) != sq.apex
        or K.src(sq.pr_cover) != sq.apex
        or K.tgt(sq.pr_other) != b
        or K.tgt(sq.pr_cover) != u
        or K.tgt(sq.other) != x
    ):
        rep.add("pullback-boundary", sq.cover, sq.other)
        return
    if K.comp1(sq.pr_other, sq.other) != K.comp1(sq.pr_cover, sq.cover):
        rep.add("pullback-commutes", sq.cover, sq.other)
        return
    rep.count("pullback-stability")
    if sq.pr_other not in site.covers:
        rep.add("pullback-stability", sq.cover, sq.other)
    rep.count("pullback-universal")
    for w in K.objects:
        by_img: dict = {}
        for m in K.hom(w, sq.apex):
            key = (K.comp1(m, sq.pr_other), K.comp1(m, sq.pr_cover))
            by_img[key] = by_img.get(key, 0) + 1
        left: dict = {}
        for k in K.hom(w, b):
            left.setdefault(K.comp1(k, sq.other), []).append(k)
        cones = set()
        for l in K.hom(w, u):
            for k in left.get(K.comp1(l, sq.cover), ()):
                cones.add((k, l))
        if set(by_img) != cones or any(n != 1 for n in by_img.values()):
            rep.add("pullback-universal", sq.cover, sq.other, w)
            return


def validate_site(site: Site) -> ValidationReport:
    """Check the cover class, the chosen pullbacks, J in ff and subcanonicity."""
    K = site.base
    rep = ValidationReport()
    covers = sorted(site.covers, key=K.name)
    for c in covers:
        if not K.is_onecell(c):
            rep.add("covers-declared", c)
    if rep.violations:
        return rep
    for x in K.objects:
        rep.count("identities-in-J")
        if K.id1(x) not in site.covers:
            rep.add("identities-in-J", x)
    for j in covers:
        for k in covers:
            if K.tgt(j) == K.src(k):
                rep.count("J-closed-under-composition")
                if K.comp1(j, k) not in site.covers:
                    rep.add("J-closed-under-composition", j, k)
    for sq in site.assigned_squares():
        rep.count("pullback-of-cover")
        if sq.cover not in site.covers:
            rep.add("pullback-of-cover", sq.cover, sq.other)
            continue
        _check_square(site, sq, rep)
        rep.count("identity-normalization")
        if site.is_identity(sq.cover) and (
            sq.apex != K.src(sq.other) or not site.is_identity(sq.pr_other) or sq.pr_cover != sq.other
        ):
            rep.add("identity-normalization", sq.cover, sq.other)
        if site.is_identity(sq.other) and (
            sq.apex != K.src(sq.cover) or sq.pr_other != sq.cover or not site.is_identity(sq.pr_cover)
        ):
            rep.add("identity-normalization", sq.cover, sq.other)
    for j in covers:
        rep.count("J-in-ff")
        if not is_ff(site, j):
            rep.add("J-in-ff", j)
            continue
        rep.count("strictly-2-regular")
        if not is_strictly_2_regular(site, j):
            rep.add("strictly-2-regular", j)
    return rep
