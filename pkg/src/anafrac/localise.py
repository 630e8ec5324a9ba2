"""The 2-functor ``A_J: K -> K_J``, weak equivalences and the localisation checks."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional

from .fractions import (
    Fraction,
    FractionMap,
    compose_fractions,
    enumerate_fractions,
    fraction_name,
    identity_fraction,
    identity_map,
    make_map,
    maps_between,
    map_name,
    vcompose_maps,
    vcompose_with_trace,
)
from .report import SuiteResult
from .site import MissingPullback, Site, is_ff
from .twocat import CapExceeded, TwoCatError, is_invertible_2cell
from .whisker import factor_fraction, hcompose_maps, left_whisker, right_whisker

HCOMP_DIRECT_BUDGET = 20_000
HCOMP_SAMPLE = 2_000


def aj_one(site: Site, f) -> Fraction:
    """``x <-id- x -f-> y``."""
    K = site.base
    x = K.src(f)
    return Fraction(x, K.tgt(f), x, K.id1(x), f)


def aj_two(site: Site, a) -> FractionMap:
    """The 2-cell ``a: f => g`` read as a map ``A_J(f) => A_J(g)`` on ``x x_x x = x``."""
    K = site.base
    return make_map(site, aj_one(site, K.src1(a)), aj_one(site, K.tgt1(a)), a)


def _cells(K):
    for x in K.objects:
        for y in K.objects:
            yield x, y, list(K.twocells_in(x, y))


def check_aj_strict_2functor(site: Site, *, seed: int = 0) -> SuiteResult:
    """Exhaustive check that ``A_J`` preserves all the structure strictly.

    Whiskering in both directions and ``+`` are checked on every instance;
    horizontal composition is built from them, so it is preserved as a
    consequence. It is also checked directly, on every pair when there are at
    most ``HCOMP_DIRECT_BUDGET`` of them and on a seeded sample otherwise.
    """
    t0 = time.perf_counter()
    K = site.base
    res = SuiteResult("aj", site.name)
    name = K.name
    for x in K.objects:
        res.check("identity-1cell", aj_one(site, K.id1(x)) == identity_fraction(site, x), x)
    onecells = list(K.onecells())
    by_src: dict = {}
    for f in onecells:
        by_src.setdefault(K.src(f), []).append(f)
    for f in onecells:
        Af = aj_one(site, f)
        res.check("identity-2cell", aj_two(site, K.id2(f)) == identity_map(site, Af), name(f))
        for g in by_src[K.tgt(f)]:
            res.check(
                "comp1",
                compose_fractions(site, Af, aj_one(site, g)) == aj_one(site, K.comp1(f, g)),
                name(f),
                name(g),
            )
    cells = {(x, y): cs for x, y, cs in _cells(K)}
    for (x, y), cs in cells.items():
        out_of: dict = {}
        for b in cs:
            out_of.setdefault(K.src1(b), []).append(b)
        for a in cs:
            Aa = aj_two(site, a)
            for b in out_of.get(K.tgt1(a), ()):
                t, trace = vcompose_with_trace(site, Aa, aj_two(site, b))
                res.check("vcomp", t == aj_two(site, K.vcomp(b, a)), name(a), name(b))
                # the triple pullback collapses to x and descent is trivial
                res.check(
                    "vcomp-collapse",
                    trace.triple_apex == x and trace.along == K.id1(x),
                    name(a),
                    name(b),
                )
            for z in K.objects:
                for h in K.hom(y, z):
                    res.check(
                        "right-whisker",
                        right_whisker(site, Aa, aj_one(site, h)) == aj_two(site, K.lwhisk(h, a)),
                        name(a),
                        name(h),
                    )
                for k in K.hom(z, x):
                    res.check(
                        "left-whisker",
                        left_whisker(site, aj_one(site, k), Aa) == aj_two(site, K.rwhisk(a, k)),
                        name(k),
                        name(a),
                    )
    pairs = [
        (x, y, z)
        for x in K.objects
        for y in K.objects
        for z in K.objects
        if cells[x, y] and cells[y, z]
    ]
    total = sum(len(cells[x, y]) * len(cells[y, z]) for x, y, z in pairs)

    def hcheck(a, b):
        res.check(
            "hcomp",
            hcompose_maps(site, aj_two(site, a), aj_two(site, b)) == aj_two(site, K.hcomp(a, b)),
            name(a),
            name(b),
        )

    if total <= HCOMP_DIRECT_BUDGET:
        for x, y, z in pairs:
            for a in cells[x, y]:
                for b in cells[y, z]:
                    hcheck(a, b)
        res.notes["hcomp"] = {"mode": "exhaustive", "pairs": total}
    else:
        rng = random.Random(seed)
        weights = [len(cells[x, y]) * len(cells[y, z]) for x, y, z in pairs]
        for _ in range(HCOMP_SAMPLE):
            x, y, z = rng.choices(pairs, weights)[0]
            hcheck(rng.choice(cells[x, y]), rng.choice(cells[y, z]))
        res.notes["hcomp"] = {
            "mode": "sampled",
            "pairs": total,
            "sampled": HCOMP_SAMPLE,
            "seed": seed,
            "exhaustive_via": ["left-whisker", "right-whisker", "vcomp"],
        }
    res.elapsed = time.perf_counter() - t0
    return res


def check_locally_ff(site: Site, x, y) -> bool:
    """``K(x, y) -> K_J(x, y)`` is bijective on 2-cells between every pair."""
    return _locally_ff_mismatch(site, x, y) is None


def _locally_ff_mismatch(site: Site, x, y):
    K = site.base
    for f in K.hom(x, y):
        Af = aj_one(site, f)
        for g in K.hom(x, y):
            cells = list(K.cells_between(f, g))
            maps = maps_between(site, Af, aj_one(site, g))
            if len(maps) != len(cells) or [t.cell for t in maps] != cells:
                return f, g, len(cells), len(maps)
    return None


def check_locally_ff_all(site: Site) -> SuiteResult:
    t0 = time.perf_counter()
    K = site.base
    res = SuiteResult("locally-ff", site.name)
    for x in K.objects:
        for y in K.objects:
            bad = _locally_ff_mismatch(site, x, y)
            if bad is None:
                res.check("locally-ff", True)
            else:
                f, g, nc, nm = bad
                res.fail("locally-ff", K.name(f), K.name(g), f"{nc} 2-cells", f"{nm} maps")
    res.elapsed = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# weak equivalences


@dataclass(frozen=True)
class WeakEquivalenceWitness:
    """``q.s => cover`` invertible, with ``cover: u -> y`` in J and ``s: u -> x``."""

    arrow: object
    cover: object
    section: object
    cell: object


def local_splitting(site: Site, q) -> Optional[WeakEquivalenceWitness]:
    K = site.base
    x, y = K.src(q), K.tgt(q)
    for c in sorted((c for c in site.covers if K.tgt(c) == y), key=K.name):
        for s in K.hom(K.src(c), x):
            for a in K.cells_between(K.comp1(s, q), c):
                if is_invertible_2cell(K, a):
                    return WeakEquivalenceWitness(q, c, s, a)
    return None


def is_weak_equivalence(site: Site, f) -> tuple[bool, Optional[WeakEquivalenceWitness]]:
    if not is_ff(site, f):
        return False, None
    w = local_splitting(site, f)
    return w is not None, w


# ---------------------------------------------------------------------------
# equivalences in K_J


@dataclass(frozen=True)
class EquivalenceWitness:
    """``G`` pseudoinverse to ``F`` with ``unit: 1 => F G`` and ``counit: G F => 1``.

    ``unit_inv`` and ``counit_inv`` are the inverse maps.
    """

    fraction: Fraction
    pseudoinverse: Fraction
    unit: FractionMap
    unit_inv: FractionMap
    counit: FractionMap
    counit_inv: FractionMap


def invertible_map(site: Site, A: Fraction, B: Fraction):
    """Some invertible ``t: A => B`` with its inverse, or ``None``.

    Inverses are confirmed by composing. When a composite lacks a pullback
    and ``K`` is locally thin, ``K_J(x, y)`` is thin as well, so any two
    opposite maps are mutually inverse and existence settles the question.
    Otherwise :class:`MissingPullback` propagates.
    """
    back = maps_between(site, B, A)
    forth = maps_between(site, A, B)
    try:
        idA, idB = identity_map(site, A), identity_map(site, B)
        for t in forth:
            for s in back:
                if vcompose_maps(site, t, s) == idA and vcompose_maps(site, s, t) == idB:
                    return t, s
        return None
    except MissingPullback:
        if not site.base.locally_thin():
            raise
    if forth and back:
        return forth[0], back[0]
    return None


def _candidate_pseudoinverses(site: Site, F: Fraction, apex_cap):
    K = site.base
    cands = enumerate_fractions(site, F.tgt, F.src)
    cands.sort(key=lambda G: K.object_size(G.apex))
    kept = [G for G in cands if apex_cap is None or K.object_size(G.apex) <= apex_cap]
    return kept, len(cands) - len(kept)


@dataclass(frozen=True)
class NotFFWitness:
    """Postcomposition with ``fraction`` is not bijective on maps ``H => H2``.

    Equivalences in a bicategory are fully faithful, so this refutes ``fraction``
    being one.
    """

    fraction: Fraction
    H: Fraction
    H2: Fraction
    maps_before: int
    maps_after: int


def kj_ff_refutation(site: Site, F: Fraction) -> Optional[NotFFWitness]:
    """Look for ``H, H2: w -> x`` in the image of ``A_J`` with a mismatched map count."""
    K = site.base
    x = F.src
    for w in K.objects:
        homs = K.hom(w, x)
        for h in homs:
            H = aj_one(site, h)
            try:
                HF = compose_fractions(site, H, F)
            except MissingPullback:
                continue
            for h2 in homs:
                H2 = aj_one(site, h2)
                try:
                    after = len(maps_between(site, HF, compose_fractions(site, H2, F)))
                except MissingPullback:
                    continue
                before = len(maps_between(site, H, H2))
                if before != after:
                    return NotFFWitness(F, H, H2, before, after)
    return None


def is_equivalence_in_KJ(site: Site, F: Fraction, apex_cap=None):
    """Bounded search for a pseudoinverse of ``F`` with invertible unit and counit.

    Returns ``(True, EquivalenceWitness)``, or ``(False, refutation)`` where
    the refutation is a :class:`NotFFWitness` or ``None`` when every candidate
    was tried and failed. The counit side ``G F`` is decided first, since for
    ``F`` in the image of ``A_J`` it needs no pullback beyond ``G``'s own.
    Candidates with apex larger than ``apex_cap`` are not tried, and
    candidates whose composites lack a pullback cannot be decided; if either
    happened and nothing settled the question, :class:`CapExceeded` is raised
    rather than answering ``False``.
    """
    x, y = F.src, F.tgt
    cands, truncated = _candidate_pseudoinverses(site, F, apex_cap)
    undecided = 0
    ix, iy = identity_fraction(site, x), identity_fraction(site, y)
    for G in cands:
        try:
            c = invertible_map(site, compose_fractions(site, G, F), iy)
            if c is None:
                continue
            u = invertible_map(site, ix, compose_fractions(site, F, G))
            if u is None:
                continue
        except MissingPullback:
            undecided += 1
            continue
        return True, EquivalenceWitness(F, G, u[0], u[1], c[0], c[1])
    if truncated or undecided:
        refutation = kj_ff_refutation(site, F)
        if refutation is not None:
            return False, refutation
        raise CapExceeded(
            f"no pseudoinverse among {len(cands) - undecided} decided candidates; "
            f"{truncated} above the apex cap, {undecided} without pullbacks"
        )
    return False, None


def check_characterisation(site: Site, apex_cap=None, *, objects=None) -> SuiteResult:
    """``A_J(f)`` is an equivalence exactly when ``f`` is a weak equivalence.

    ``objects`` restricts the 1-cells tested to those between the given
    objects; the search in ``K_J`` still ranges over the whole site, which
    then serves as headroom for the pullbacks the search needs.
    """
    t0 = time.perf_counter()
    K = site.base
    res = SuiteResult("characterisation", site.name)
    scope = list(K.objects) if objects is None else list(objects)
    tally = {"both": 0, "neither": 0, "refuted-by-ff": 0}
    for j in sorted(site.covers, key=K.name):
        if K.src(j) in scope and K.tgt(j) in scope:
            res.check("cover-is-weak-equivalence", is_weak_equivalence(site, j)[0], K.name(j))
    for x in scope:
        for y in scope:
            for f in K.hom(x, y):
                we, _ = is_weak_equivalence(site, f)
                try:
                    eq, why = is_equivalence_in_KJ(site, aj_one(site, f), apex_cap)
                except CapExceeded as exc:
                    res.fail("truncated", K.name(f), f"weak equivalence={we}", str(exc))
                    continue
                if res.check("iff", we == eq, K.name(f), f"weak equivalence={we}", f"equivalence={eq}"):
                    tally["both" if we else "neither"] += 1
                    if isinstance(why, NotFFWitness):
                        tally["refuted-by-ff"] += 1
    res.notes["agreement"] = tally
    res.notes["apex_cap"] = apex_cap
    res.notes["objects"] = [str(x) for x in scope]
    res.elapsed = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# EF conditions


def check_EF_conditions(site: Site) -> SuiteResult:
    t0 = time.perf_counter()
    K = site.base
    res = SuiteResult("ef", site.name)
    # EF1: identity on objects
    for x in K.objects:
        res.check("EF1", aj_one(site, K.id1(x)).src == x and identity_fraction(site, x).src == x, x)
    # EF2: (j, f) is the composite of (j, id_u) and (id_u, f) on the nose, and
    # (j, id_u) is a pseudoinverse of A_J(j)
    for j in sorted(site.covers, key=K.name):
        try:
            inverse = pseudoinverse_of_cover(site, j)
        except MissingPullback:
            res.skip("EF2-pseudoinverse")
            continue
        res.check("EF2-pseudoinverse", inverse is not None, K.name(j))
    for x in K.objects:
        for y in K.objects:
            for F in enumerate_fractions(site, x, y):
                first, second = factor_fraction(site, F)
                res.check("EF2", compose_fractions(site, first, second) == F, fraction_name(K, F))
    # EF3: local full faithfulness
    res.merge(check_locally_ff_all(site), "EF3:")
    res.elapsed = time.perf_counter() - t0
    return res


def pseudoinverse_of_cover(site: Site, j) -> Optional[EquivalenceWitness]:
    """Check that ``(j, id_u)`` is pseudoinverse to ``A_J(j) = (id_u, j)``."""
    K = site.base
    u, x = K.src(j), K.tgt(j)
    F = aj_one(site, j)
    G = Fraction(x, u, u, j, K.id1(u))
    FG, GF = compose_fractions(site, F, G), compose_fractions(site, G, F)
    unit = invertible_map(site, identity_fraction(site, u), FG)
    counit = invertible_map(site, GF, identity_fraction(site, x))
    if unit is None or counit is None:
        return None
    return EquivalenceWitness(F, G, unit[0], unit[1], counit[0], counit[1])


def witness_dict(K, w) -> dict:
    if isinstance(w, WeakEquivalenceWitness):
        return {
            "arrow": K.name(w.arrow),
            "cover": K.name(w.cover),
            "section": K.name(w.section),
            "cell": K.name(w.cell),
        }
    if isinstance(w, EquivalenceWitness):
        return {
            "fraction": fraction_name(K, w.fraction),
            "pseudoinverse": fraction_name(K, w.pseudoinverse),
            "unit": map_name(K, w.unit),
            "counit": map_name(K, w.counit),
        }
    raise TypeError(type(w))


__all__ = [
    "EquivalenceWitness",
    "NotFFWitness",
    "TwoCatError",
    "WeakEquivalenceWitness",
    "aj_one",
    "aj_two",
    "check_EF_conditions",
    "check_aj_strict_2functor",
    "check_characterisation",
    "check_locally_ff",
    "check_locally_ff_all",
    "invertible_map",
    "is_equivalence_in_KJ",
    "is_weak_equivalence",
    "kj_ff_refutation",
    "local_splitting",
    "pseudoinverse_of_cover",
    "witness_dict",
]
