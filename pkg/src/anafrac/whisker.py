"""Whiskering of maps of fractions, horizontal composition and the associator.

For a map ``t: (j, f) => (k, g)`` in ``K_J(x, y)`` and a fraction
``G = (l, h)`` from ``y`` to ``z``, :func:`right_whisker` gives the map
``t G: (j, f)G => (k, g)G``. Left whiskering by ``F = (j, f)`` factors as
``F = (id_u, f) o (j, id_u)`` (first ``(j, id_u)``) and is computed as the
case-I whiskering by ``(id_u, f)`` followed by the case-II whiskering by
``(j, id_u)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fractions import (
    Fraction,
    FractionError,
    FractionMap,
    compose_fractions,
    iota,
    make_renaming,
    map_square,
    vcompose_maps,
)
from .site import Site, descend_2cell, induced_arrow, lift_2cell, pullback, unique_lift_2cell
from .twocat import TwoCatError


class InterchangeViolation(TwoCatError):
    """The two horizontal composition orders disagree."""


@dataclass
class WhiskerTrace:
    kind: str  # right | left-I | left-II | left
    inputs: tuple
    apexes: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)  # (description, holds)

    @property
    def ok(self) -> bool:
        return all(holds for _, holds in self.certificates)


def _trace(trace, kind, inputs):
    return WhiskerTrace(kind, inputs) if trace else None


def right_whisker(site: Site, t: FractionMap, G: Fraction, *, trace: bool = False):
    """``t`` whiskered on the right by ``G = (l, h)``.

    The cell is ``h`` postcomposed with the unique lift through ``l`` of
    ``t`` restricted along the comparison map into ``u x_x v``.
    """
    K = site.base
    F1, F2 = t.source, t.target
    if F1.tgt != G.src:
        raise FractionError("fraction map and fraction are not composable")
    l, h = G.cover, G.arrow
    C1, C2 = compose_fractions(site, F1, G), compose_fractions(site, F2, G)
    sq1, sq2 = pullback(site, l, F1.arrow), pullback(site, l, F2.arrow)
    Q = map_square(site, C1, C2)
    m = induced_arrow(
        site, t.square, K.comp1(Q.pr_other, sq1.pr_other), K.comp1(Q.pr_cover, sq2.pr_other)
    )
    restricted = K.rwhisk(t.cell, m)
    lam = lift_2cell(K, l, K.comp1(Q.pr_other, sq1.pr_cover), K.comp1(Q.pr_cover, sq2.pr_cover), restricted)
    out = FractionMap(C1, C2, Q, K.lwhisk(h, lam))
    tr = _trace(trace, "right", (t, G))
    if tr:
        tr.apexes.update(composite_source=C1.apex, composite_target=C2.apex, square=Q.apex)
        tr.certificates.append(("lift through l reproduces t on the comparison", K.lwhisk(l, lam) == restricted))
        return out, tr
    return out


def left_whisker_I(site: Site, F: Fraction, a: FractionMap, *, trace: bool = False):
    """Case I: ``F = (id_u, f)``; the cell is ``a`` restricted to ``u x_y v12``."""
    K = site.base
    if F.cover != K.id1(F.apex):
        raise FractionError("case I needs an identity cover")
    G1, G2 = a.source, a.target
    if F.tgt != G1.src:
        raise FractionError("fraction and fraction map are not composable")
    B1, B2 = pullback(site, G1.cover, F.arrow), pullback(site, G2.cover, F.arrow)
    C1, C2 = compose_fractions(site, F, G1), compose_fractions(site, F, G2)
    Q = map_square(site, C1, C2)
    m = induced_arrow(
        site, a.square, K.comp1(Q.pr_other, B1.pr_cover), K.comp1(Q.pr_cover, B2.pr_cover)
    )
    out = FractionMap(C1, C2, Q, K.rwhisk(a.cell, m))
    tr = _trace(trace, "left-I", (F, a))
    if tr:
        tr.apexes.update(v12=a.square.apex, u_v12=Q.apex)
        tr.certificates.append(("comparison into v12 commutes", K.comp1(m, a.square.pr_other) == K.comp1(Q.pr_other, B1.pr_cover)))
        return out, tr
    return out


@dataclass(frozen=True)
class CaseIIData:
    """The objects and cells entering the defining equation of case II."""

    W: object  # square with pr_other: W -> V12 (descent cover), pr_cover: W -> v12
    mu1: object  # P1.piV => p1.piv
    mu2: object  # p2.piv => P2.piV
    rhs: object  # the pasted cell on W


def case_II_data(site: Site, F: Fraction, a: FractionMap, C1: Fraction, C2: Fraction, V) -> CaseIIData:
    K = site.base
    v = a.square
    c_V = K.comp1(V.pr_other, C1.cover)
    c_v = K.comp1(v.pr_other, C1.cover)
    W = pullback(site, c_v, c_V)
    piV, piv = W.pr_other, W.pr_cover
    mu1 = unique_lift_2cell(site, C1.cover, K.comp1(piV, V.pr_other), K.comp1(piv, v.pr_other))
    mu2 = unique_lift_2cell(site, C2.cover, K.comp1(piv, v.pr_cover), K.comp1(piV, V.pr_cover))
    g1, g2 = a.source.arrow, a.target.arrow
    rhs = K.vcomp(K.lwhisk(g2, mu2), K.vcomp(K.rwhisk(a.cell, piv), K.lwhisk(g1, mu1)))
    return CaseIIData(W, mu1, mu2, rhs)


def left_whisker_II(site: Site, F: Fraction, a: FractionMap, *, trace: bool = False):
    """Case II: ``F = (j, id_u)``; the cell is defined by descent along ``W -> V12``."""
    K = site.base
    if F.arrow != K.id1(F.apex):
        raise FractionError("case II needs an identity arrow")
    G1, G2 = a.source, a.target
    if F.tgt != G1.src:
        raise FractionError("fraction and fraction map are not composable")
    C1, C2 = compose_fractions(site, F, G1), compose_fractions(site, F, G2)
    V = map_square(site, C1, C2)
    data = case_II_data(site, F, a, C1, C2, V)
    s = K.comp1(V.pr_other, C1.arrow)
    t = K.comp1(V.pr_cover, C2.arrow)
    cell = descend_2cell(site, data.W.pr_other, s, t, data.rhs)
    out = FractionMap(C1, C2, V, cell)
    tr = _trace(trace, "left-II", (F, a))
    if tr:
        tr.apexes.update(v12=a.square.apex, V12=V.apex, v12_V12=data.W.apex)
        tr.certificates.append(("descended cell reproduces the pasting", K.rwhisk(cell, data.W.pr_other) == data.rhs))
        return out, tr
    return out


def factor_fraction(site: Site, F: Fraction) -> tuple[Fraction, Fraction]:
    """``(j, id_u)`` and ``(id_u, f)``, whose composite is ``F`` on the nose."""
    K = site.base
    i = K.id1(F.apex)
    return Fraction(F.src, F.apex, F.apex, F.cover, i), Fraction(F.apex, F.tgt, F.apex, i, F.arrow)


def left_whisker(site: Site, F: Fraction, a: FractionMap, *, trace: bool = False):
    first, second = factor_fraction(site, F)
    b = left_whisker_I(site, second, a, trace=trace)
    c = left_whisker_II(site, first, b[0] if trace else b, trace=trace)
    out = c[0] if trace else c
    if out.source != compose_fractions(site, F, a.source) or out.target != compose_fractions(
        site, F, a.target
    ):
        raise FractionError("case I and case II do not compose to the whiskering by F")
    if trace:
        tr = WhiskerTrace("left", (F, a))
        tr.apexes.update({f"I.{k}": v for k, v in b[1].apexes.items()})
        tr.apexes.update({f"II.{k}": v for k, v in c[1].apexes.items()})
        tr.certificates.extend(b[1].certificates + c[1].certificates)
        return out, tr
    return out


def hcompose_maps(site: Site, a: FractionMap, b: FractionMap, *, check: bool = True) -> FractionMap:
    """Horizontal composite of ``a: F1 => F2`` (x to y) and ``b: G1 => G2`` (y to z).

    Computed as ``F1 b + a G2``; with ``check`` the other order
    ``a G1 + F2 b`` is computed too and must agree.
    """
    first = vcompose_maps(site, left_whisker(site, a.source, b), right_whisker(site, a, b.target))
    if check:
        other = vcompose_maps(site, right_whisker(site, a, b.source), left_whisker(site, a.target, b))
        if other != first:
            raise InterchangeViolation("horizontal composition depends on the order of whiskering")
    return first


def associator_renaming(site: Site, F1: Fraction, F2: Fraction, F3: Fraction):
    """The renaming ``(F1 F2) F3 -> F1 (F2 F3)`` given by the canonical isomorphism."""
    K = site.base
    F12, F23 = compose_fractions(site, F1, F2), compose_fractions(site, F2, F3)
    L, R = compose_fractions(site, F12, F3), compose_fractions(site, F1, F23)
    A = pullback(site, F2.cover, F1.arrow)
    sqL = pullback(site, F3.cover, F12.arrow)
    B = pullback(site, F3.cover, F2.arrow)
    sqR = pullback(site, F23.cover, F1.arrow)
    lu = K.comp1(sqL.pr_other, A.pr_other)
    lv = K.comp1(sqL.pr_other, A.pr_cover)
    r = induced_arrow(site, sqR, lu, induced_arrow(site, B, lv, sqL.pr_cover))
    rv = K.comp1(sqR.pr_cover, B.pr_other)
    rw = K.comp1(sqR.pr_cover, B.pr_cover)
    s = induced_arrow(site, sqL, induced_arrow(site, A, sqR.pr_other, rv), rw)
    if K.comp1(r, s) != K.id1(L.apex) or K.comp1(s, r) != K.id1(R.apex):
        raise FractionError("associativity comparison maps are not mutually inverse")
    return make_renaming(site, L, R, r, K.id2(L.arrow))


def associator(site: Site, F1: Fraction, F2: Fraction, F3: Fraction) -> FractionMap:
    return iota(site, associator_renaming(site, F1, F2, F3))
