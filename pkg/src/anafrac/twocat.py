"""Finite strict 2-categories and their elementary cell operations.

Conventions used throughout the package:

* ``comp1(f, g)`` is the composite *g after f* (requires ``tgt(f) == src(g)``).
* ``vcomp(a, b)`` is ``a . b``: first ``b``, then ``a`` (requires
  ``tgt1(b) == src1(a)``).
* ``lwhisk(h, a)`` postcomposes the 2-cell ``a: f => g`` with the 1-cell
  ``h``, giving ``h.f => h.g``; ``rwhisk(a, k)`` precomposes, giving
  ``f.k => g.k``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Iterator

import numpy as np

Cell = Hashable

DEFAULT_CAPS = {"objects": 64, "onecells": 4096, "twocells": 1 << 20}
CAPS_ENV = "ANAFRAC_CAPS"


class TwoCatError(Exception):
    """Base class for errors raised by this package."""


class NotComposable(TwoCatError):
    pass


class MalformedTable(TwoCatError):
    pass


class CapExceeded(TwoCatError):
    pass


def size_caps() -> dict[str, int]:
    """Default size caps, overridable as ``ANAFRAC_CAPS=objects,onecells,twocells``."""
    caps = dict(DEFAULT_CAPS)
    raw = os.environ.get(CAPS_ENV)
    if raw:
        parts = [int(p) for p in raw.split(",")]
        if len(parts) != 3:
            raise ValueError(f"{CAPS_ENV} must hold three comma-separated integers")
        caps = dict(zip(("objects", "onecells", "twocells"), parts))
    return caps


class TwoCategory:
    """Interface shared by tabulated and formula-driven 2-categories.

    Subclasses provide the primitive lookups; nothing here mutates state,
    apart from write-once caches.
    """

    objects: tuple

    # -- 1-cells ---------------------------------------------------------
    def hom(self, x, y) -> tuple:
        raise NotImplementedError

    def src(self, f):
        raise NotImplementedError

    def tgt(self, f):
        raise NotImplementedError

    def id1(self, x):
        raise NotImplementedError

    def comp1(self, f, g):
        raise NotImplementedError

    def is_onecell(self, f) -> bool:
        raise NotImplementedError

    # -- 2-cells ---------------------------------------------------------
    def cells_between(self, f, g) -> tuple:
        raise NotImplementedError

    def src1(self, a):
        raise NotImplementedError

    def tgt1(self, a):
        raise NotImplementedError

    def id2(self, f):
        raise NotImplementedError

    def vcomp(self, a, b):
        raise NotImplementedError

    def lwhisk(self, h, a):
        raise NotImplementedError

    def rwhisk(self, a, k):
        raise NotImplementedError

    def is_twocell(self, a) -> bool:
        raise NotImplementedError

    def name(self, cell) -> str:
        return str(cell)

    # -- derived ---------------------------------------------------------
    def onecells(self) -> Iterator:
        for x in self.objects:
            for y in self.objects:
                yield from self.hom(x, y)

    def twocells(self) -> Iterator:
        for x in self.objects:
            for y in self.objects:
                yield from self.twocells_in(x, y)

    def twocells_in(self, x, y) -> Iterator:
        homxy = self.hom(x, y)
        for f in homxy:
            for g in homxy:
                yield from self.cells_between(f, g)

    def counts(self) -> dict[str, int]:
        return {
            "objects": len(self.objects),
            "onecells": sum(1 for _ in self.onecells()),
            "twocells": sum(1 for _ in self.twocells()),
        }

    def object_size(self, x) -> int:
        """Size of an object, used only to bound searches; 1 unless known."""
        return getattr(self, "sizes", {}).get(x, 1)

    def locally_thin(self) -> bool:
        """At most one 2-cell between any parallel pair of 1-cells."""
        cached = self.__dict__.get("_thin")
        if cached is None:
            cached = all(
                len(self.cells_between(f, g)) <= 1
                for x in self.objects
                for y in self.objects
                for f in self.hom(x, y)
                for g in self.hom(x, y)
            )
            self._thin = cached
        return cached

    def check_caps(self, caps: dict[str, int] | None = None) -> None:
        caps = caps or size_caps()
        for key, value in self.counts().items():
            if value > caps[key]:
                raise CapExceeded(f"{value} {key} exceeds cap {caps[key]}")

    def hcomp(self, a, b):
        """Horizontal composite of ``a: f => g: x -> y`` and ``b: h => k: y -> z``.

        Defined as ``(b * g) . (h * a)``; interchange makes the other order agree.
        """
        g = self.tgt1(a)
        h = self.src1(b)
        return self.vcomp(self.rwhisk(b, g), self.lwhisk(h, a))


class TabulatedTwoCategory(TwoCategory):
    """A 2-category given by explicit, total composition tables."""

    def __init__(
        self,
        objects: Iterable,
        onecells: dict,  # id -> (src, tgt)
        twocells: dict,  # id -> (src1, tgt1)
        comp1: dict,  # (f, g) -> g.f
        id1: dict,
        vcomp: dict,  # (a, b) -> a.b
        id2: dict,
        lwhisk: dict,  # (h, a) -> h*a
        rwhisk: dict,  # (a, k) -> a*k
    ):
        self.objects = tuple(objects)
        self._one = dict(onecells)
        self._two = dict(twocells)
        self.comp1_table = dict(comp1)
        self.id1_table = dict(id1)
        self.vcomp_table = dict(vcomp)
        self.id2_table = dict(id2)
        self.lwhisk_table = dict(lwhisk)
        self.rwhisk_table = dict(rwhisk)
        self._hom: dict = {(x, y): [] for x in self.objects for y in self.objects}
        for f, (s, t) in self._one.items():
            if (s, t) not in self._hom:
                raise MalformedTable(f"1-cell {f!r} has undeclared boundary object")
            self._hom[s, t].append(f)
        self._hom = {k: tuple(v) for k, v in self._hom.items()}
        self._between: dict = {}
        for a, (f, g) in self._two.items():
            if f not in self._one or g not in self._one:
                raise MalformedTable(f"2-cell {a!r} has undeclared boundary 1-cell")
            self._between.setdefault((f, g), []).append(a)
        self._between = {k: tuple(v) for k, v in self._between.items()}

    @classmethod
    def materialize(cls, K: TwoCategory) -> "TabulatedTwoCategory":
        """Tabulate any finite 2-category (used to serialize generated sites)."""
        one = {f: (K.src(f), K.tgt(f)) for f in K.onecells()}
        two = {a: (K.src1(a), K.tgt1(a)) for a in K.twocells()}
        comp1, vcomp, lw, rw = {}, {}, {}, {}
        for x, y, z in product(K.objects, repeat=3):
            for f in K.hom(x, y):
                for g in K.hom(y, z):
                    comp1[f, g] = K.comp1(f, g)
        for x, y in product(K.objects, repeat=2):
            homxy = K.hom(x, y)
            for f, g, h in product(homxy, repeat=3):
                for b in K.cells_between(f, g):
                    for a in K.cells_between(g, h):
                        vcomp[a, b] = K.vcomp(a, b)
        for x, y, z in product(K.objects, repeat=3):
            cells_xy = list(K.twocells_in(x, y))
            cells_yz = list(K.twocells_in(y, z))
            for h in K.hom(y, z):
                for a in cells_xy:
                    lw[h, a] = K.lwhisk(h, a)
            for k in K.hom(x, y):
                for a in cells_yz:
                    rw[a, k] = K.rwhisk(a, k)
        return cls(
            K.objects,
            one,
            two,
            comp1,
            {x: K.id1(x) for x in K.objects},
            vcomp,
            {f: K.id2(f) for f in one},
            lw,
            rw,
        )

    def hom(self, x, y):
        return self._hom[x, y]

    def src(self, f):
        return self._one[f][0]

    def tgt(self, f):
        return self._one[f][1]

    def id1(self, x):
        return self.id1_table[x]

    def comp1(self, f, g):
        try:
            return self.comp1_table[f, g]
        except KeyError:
            raise NotComposable(f"no comp1 entry for ({f!r}, {g!r})") from None

    def is_onecell(self, f):
        return f in self._one

    def cells_between(self, f, g):
        return self._between.get((f, g), ())

    def src1(self, a):
        return self._two[a][0]

    def tgt1(self, a):
        return self._two[a][1]

    def id2(self, f):
        return self.id2_table[f]

    def vcomp(self, a, b):
        try:
            return self.vcomp_table[a, b]
        except KeyError:
            raise NotComposable(f"no vcomp entry for ({a!r}, {b!r})") from None

    def lwhisk(self, h, a):
        try:
            return self.lwhisk_table[h, a]
        except KeyError:
            raise NotComposable(f"no lwhisk entry for ({h!r}, {a!r})") from None

    def rwhisk(self, a, k):
        try:
            return self.rwhisk_table[a, k]
        except KeyError:
            raise NotComposable(f"no rwhisk entry for ({a!r}, {k!r})") from None

    def is_twocell(self, a):
        return a in self._two

    def onecells(self):
        return iter(self._one)

    def twocells(self):
        return iter(self._two)


# ---------------------------------------------------------------------------
# checked public operations


def compose1(K: TwoCategory, f, g):
    """Return ``g . f``."""
    if K.tgt(f) != K.src(g):
        raise NotComposable(f"tgt({K.name(f)}) != src({K.name(g)})")
    return K.comp1(f, g)


def vcomp2(K: TwoCategory, a, b):
    """Return ``a . b`` (``b`` first)."""
    if K.tgt1(b) != K.src1(a):
        raise NotComposable(f"tgt1({K.name(b)}) != src1({K.name(a)})")
    return K.vcomp(a, b)


def whisker_left(K: TwoCategory, h, a):
    """Postcompose the 2-cell ``a`` with the 1-cell ``h``."""
    if K.tgt(K.src1(a)) != K.src(h):
        raise NotComposable(f"cannot whisker {K.name(a)} by {K.name(h)} on the left")
    return K.lwhisk(h, a)


def whisker_right(K: TwoCategory, a, k):
    """Precompose the 2-cell ``a`` with the 1-cell ``k``."""
    if K.tgt(k) != K.src(K.src1(a)):
        raise NotComposable(f"cannot whisker {K.name(a)} by {K.name(k)} on the right")
    return K.rwhisk(a, k)


def inverse_2cell(K: TwoCategory, a):
    f, g = K.src1(a), K.tgt1(a)
    for b in K.cells_between(g, f):
        if K.vcomp(a, b) == K.id2(g) and K.vcomp(b, a) == K.id2(f):
            return b
    return None


def is_invertible_2cell(K: TwoCategory, a) -> bool:
    return inverse_2cell(K, a) is not None


# ---------------------------------------------------------------------------
# finite categories


@dataclass
class FiniteCategory:
    """A materialized finite category; ``compose[(a, b)]`` is *b after a*."""

    objects: list
    arrows: list
    dom: dict
    cod: dict
    identity: dict
    compose: dict
    provenance: dict = field(default_factory=dict)

    def hom(self, x, y) -> list:
        return [a for a in self.arrows if self.dom[a] == x and self.cod[a] == y]

    def axiom_violations(self) -> list[str]:
        out = []
        for x in self.objects:
            i = self.identity.get(x)
            if i is None or self.dom[i] != x or self.cod[i] != x:
                out.append(f"identity of {x!r} missing or ill-typed")
        by_dom: dict = {}
        for a in self.arrows:
            by_dom.setdefault(self.dom[a], []).append(a)
        for a in self.arrows:
            for b in by_dom.get(self.cod[a], ()):
                c = self.compose.get((a, b))
                if c is None or self.dom[c] != self.dom[a] or self.cod[c] != self.cod[b]:
                    out.append(f"composite of {a!r} then {b!r} missing or ill-typed")
        if out:
            return out
        for a in self.arrows:
            if self.compose[self.identity[self.dom[a]], a] != a:
                out.append(f"left unit fails at {a!r}")
            if self.compose[a, self.identity[self.cod[a]]] != a:
                out.append(f"right unit fails at {a!r}")
            for b in by_dom.get(self.cod[a], ()):
                ab = self.compose[a, b]
                for c in by_dom.get(self.cod[b], ()):
                    if self.compose[ab, c] != self.compose[a, self.compose[b, c]]:
                        out.append(f"associativity fails at ({a!r}, {b!r}, {c!r})")
        return out


def hom_category(K: TwoCategory, x, y) -> FiniteCategory:
    """Materialize ``K(x, y)`` with composition given by vertical composition."""
    objs = list(K.hom(x, y))
    arrows, dom, cod = [], {}, {}
    for f in objs:
        for g in objs:
            for a in K.cells_between(f, g):
                arrows.append(a)
                dom[a], cod[a] = f, g
    compose = {}
    for a in arrows:
        for b in arrows:
            if cod[a] == dom[b]:
                compose[a, b] = K.vcomp(b, a)
    return FiniteCategory(objs, arrows, dom, cod, {f: K.id2(f) for f in objs}, compose)


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    law: str
    witness: tuple

    def as_dict(self, name=str) -> dict:
        return {"law": self.law, "witness": [name(c) for c in self.witness]}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, *witness) -> None:
        self.violations.append(Violation(law, witness))

    def count(self, law: str, n: int = 1) -> None:
        self.checked[law] = self.checked.get(law, 0) + n

    def laws(self) -> list[str]:
        return sorted({v.law for v in self.violations})


VALIDATION_TWOCELL_BUDGET = 1 << 14
WITNESS_LIMIT = 25


class _Compiled:
    """Integer-indexed tables of a finite 2-category.

    ``V[b, pos[a]]`` is ``vcomp(a, b)``, where ``pos[a]`` is the position of
    ``a`` among the 2-cells sharing its source 1-cell. ``LW[h, a]`` and
    ``RW[a, k]`` are the whiskers; ``-1`` marks undefined entries.
    """

    def __init__(self, K: TwoCategory):
        name = K.name
        self.objs = list(K.objects)
        oidx = {x: i for i, x in enumerate(self.objs)}
        self.one: list = []
        for x, y in product(self.objs, repeat=2):
            self.one.extend(K.hom(x, y))
        i1 = {f: i for i, f in enumerate(self.one)}
        n1 = len(self.one)
        self.s1 = np.array([oidx[K.src(f)] for f in self.one], dtype=np.int64)
        self.t1 = np.array([oidx[K.tgt(f)] for f in self.one], dtype=np.int64)

        def idx1(f, what):
            try:
                return i1[f]
            except (KeyError, TypeError):
                raise MalformedTable(f"{what} entry {f!r} is not a declared 1-cell") from None

        self.id1 = np.array([idx1(K.id1(x), f"id1({x!r})") for x in self.objs], dtype=np.int64)
        self.C1 = np.full((n1, n1), -1, dtype=np.int64)
        out1: dict = {}
        for i, f in enumerate(self.one):
            out1.setdefault(self.s1[i], []).append(i)
        for i, f in enumerate(self.one):
            for j in out1.get(self.t1[i], ()):
                g = self.one[j]
                try:
                    c = K.comp1(f, g)
                except (NotComposable, KeyError):
                    raise MalformedTable(f"comp1 missing for ({name(f)}, {name(g)})") from None
                self.C1[i, j] = idx1(c, "comp1")

        self.two: list = []
        for x, y in product(self.objs, repeat=2):
            self.two.extend(K.twocells_in(x, y))
        n2 = len(self.two)
        if n2 > VALIDATION_TWOCELL_BUDGET:
            raise CapExceeded(
                f"{n2} 2-cells exceed the exhaustive validation budget {VALIDATION_TWOCELL_BUDGET}"
            )
        i2 = {a: i for i, a in enumerate(self.two)}
        self.S2 = np.array([idx1(K.src1(a), "src1") for a in self.two], dtype=np.int64)
        self.T2 = np.array([idx1(K.tgt1(a), "tgt1") for a in self.two], dtype=np.int64)

        def call2(fn, *args):
            try:
                out = fn(*args)
            except (NotComposable, KeyError):
                raise MalformedTable(
                    f"{fn.__name__} missing for ({', '.join(name(a) for a in args)})"
                ) from None
            try:
                return i2[out]
            except (KeyError, TypeError):
                raise MalformedTable(f"{fn.__name__} entry {out!r} is not a declared 2-cell") from None

        self.ID2 = np.array([call2(K.id2, f) for f in self.one], dtype=np.int64)
        # cells grouped by source and by target 1-cell
        self.out2 = [[] for _ in range(n1)]
        self.in2 = [[] for _ in range(n1)]
        for i in range(n2):
            self.out2[self.S2[i]].append(i)
            self.in2[self.T2[i]].append(i)
        self.pos = np.zeros(n2, dtype=np.int64)
        for group in self.out2:
            for p, i in enumerate(group):
                self.pos[i] = p
        width = max((len(g) for g in self.out2), default=0)
        self.V = np.full((n2, max(width, 1)), -1, dtype=np.int64)
        for b in range(n2):
            for a in self.out2[self.T2[b]]:
                self.V[b, self.pos[a]] = call2(K.vcomp, self.two[a], self.two[b])
        self.out2 = [np.array(g, dtype=np.int64) for g in self.out2]
        self.in2 = [np.array(g, dtype=np.int64) for g in self.in2]

        # object boundary of each 2-cell
        self.x2 = self.s1[self.S2] if n2 else np.zeros(0, dtype=np.int64)
        self.y2 = self.t1[self.S2] if n2 else np.zeros(0, dtype=np.int64)
        no = len(self.objs)
        self.out1 = [np.flatnonzero(self.s1 == o) for o in range(no)]
        self.in1 = [np.flatnonzero(self.t1 == o) for o in range(no)]
        self.cells_from = [np.flatnonzero(self.x2 == o) for o in range(no)]
        self.LW = np.full((n1, n2), -1, dtype=np.int64)
        self.RW = np.full((n2, n1), -1, dtype=np.int64)
        for a in range(n2):
            cell = self.two[a]
            for h in self.out1[self.y2[a]]:
                self.LW[h, a] = call2(K.lwhisk, self.one[h], cell)
            for k in self.in1[self.x2[a]]:
                self.RW[a, k] = call2(K.rwhisk, cell, self.one[k])

    def vc(self, a, b):
        """Vectorized ``vcomp(a, b)`` for index arrays of composable cells."""
        return self.V[b, self.pos[a]]


def _check_tables(K: TwoCategory) -> _Compiled:
    """Tabulate ``K``, raising MalformedTable on dangling or missing entries."""
    return _Compiled(K)


def validate_two_category(K: TwoCategory) -> ValidationReport:
    """Exhaustively check the strict 2-category laws.

    Structural table defects raise :class:`MalformedTable`; law failures are
    collected in the returned report (at most ``WITNESS_LIMIT`` witnesses per
    law, with the full count in ``failed``).
    """
    T = _check_tables(K)
    rep = ValidationReport()
    one, two = T.one, T.two
    n1, n2 = len(one), len(two)
    ar1, ar2 = np.arange(n1), np.arange(n2)

    def check(law, ok, *witness_arrays, kinds):
        ok = np.asarray(ok, dtype=bool)
        rep.count(law, int(ok.size))
        bad = np.flatnonzero(~ok.ravel())
        if not bad.size:
            return
        rep.failed[law] = rep.failed.get(law, 0) + int(bad.size)
        arrays = [np.broadcast_to(w, ok.shape).ravel() for w in witness_arrays]
        already = sum(1 for v in rep.violations if v.law == law)
        for i in bad[: max(0, WITNESS_LIMIT - already)]:
            cells = tuple(
                (one if kind == 1 else two)[int(arr[i])] for arr, kind in zip(arrays, kinds)
            )
            rep.add(law, *cells)

    # 1-cells
    check("comp1-unit", (T.C1[T.id1[T.s1], ar1] == ar1) & (T.C1[ar1, T.id1[T.t1]] == ar1), ar1, kinds=(1,))
    fi, gi = np.nonzero(T.C1 >= 0)
    c = T.C1[fi, gi]
    check("comp1-boundary", (T.s1[c] == T.s1[fi]) & (T.t1[c] == T.t1[gi]), fi, gi, kinds=(1, 1))
    for g in range(n1):
        F, H = T.in1[T.s1[g]], T.out1[T.t1[g]]
        lhs = T.C1[T.C1[F, g][:, None], H[None, :]]
        rhs = T.C1[F[:, None], T.C1[g, H][None, :]]
        check("comp1-assoc", lhs == rhs, F[:, None], g, H[None, :], kinds=(1, 1, 1))
    if rep.violations:
        return rep

    # vertical structure
    check("id2-boundary", (T.S2[T.ID2] == ar1) & (T.T2[T.ID2] == ar1), ar1, kinds=(1,))
    if n2:
        left = T.vc(T.ID2[T.T2], ar2)
        right = T.vc(ar2, T.ID2[T.S2])
        check("vcomp-unit", (left == ar2) & (right == ar2), ar2, kinds=(2,))
        for b in range(n2):
            A = T.out2[T.T2[b]]
            if A.size:
                ab = T.vc(A, b)
                ok = (T.S2[ab] == T.S2[b]) & (T.T2[ab] == T.T2[A])
                check("vcomp-boundary", ok, A, b, kinds=(2, 2))
    if rep.violations:
        return rep
    for a in range(n2):
        B, Cc = T.in2[T.S2[a]], T.out2[T.T2[a]]
        if not (B.size and Cc.size):
            continue
        ab = T.vc(a, B)
        ca = T.vc(Cc, a)
        lhs = T.vc(Cc[:, None], ab[None, :])
        rhs = T.vc(ca[:, None], B[None, :])
        check("vcomp-assoc", lhs == rhs, Cc[:, None], a, B[None, :], kinds=(2, 2, 2))
    if rep.violations:
        return rep

    # whiskering boundaries and identities
    hi, ai = np.nonzero(T.LW >= 0)
    ha = T.LW[hi, ai]
    check(
        "lwhisk-boundary",
        (T.S2[ha] == T.C1[T.S2[ai], hi]) & (T.T2[ha] == T.C1[T.T2[ai], hi]),
        hi, ai, kinds=(1, 2),
    )
    ai, ki = np.nonzero(T.RW >= 0)
    ak = T.RW[ai, ki]
    check(
        "rwhisk-boundary",
        (T.S2[ak] == T.C1[ki, T.S2[ai]]) & (T.T2[ak] == T.C1[ki, T.T2[ai]]),
        ai, ki, kinds=(2, 1),
    )
    check("lwhisk-identity", T.LW[gi, T.ID2[fi]] == T.ID2[T.C1[fi, gi]], gi, fi, kinds=(1, 1))
    check("rwhisk-identity", T.RW[T.ID2[gi], fi] == T.ID2[T.C1[fi, gi]], gi, fi, kinds=(1, 1))
    if rep.violations:
        return rep

    if n2:
        unit = (T.LW[T.id1[T.y2], ar2] == ar2) & (T.RW[ar2, T.id1[T.x2]] == ar2)
        check("whisk-unit", unit, ar2, kinds=(2,))
    pair_by_src = [np.flatnonzero(T.s1[fi] == o) for o in range(len(T.objs))]
    pair_by_tgt = [np.flatnonzero(T.t1[gi] == o) for o in range(len(T.objs))]
    for a in range(n2):
        x, y = T.x2[a], T.y2[a]
        B = T.in2[T.S2[a]]
        H, Kk = T.out1[y], T.in1[x]
        if B.size:
            ab = T.vc(a, B)
            lhs = T.LW[H[:, None], ab[None, :]]
            rhs = T.vc(T.LW[H, a][:, None], T.LW[H[:, None], B[None, :]])
            check("lwhisk-functorial", lhs == rhs, H[:, None], a, B[None, :], kinds=(1, 2, 2))
            lhs = T.RW[ab[None, :], Kk[:, None]]
            rhs = T.vc(T.RW[a, Kk][:, None], T.RW[B[None, :], Kk[:, None]])
            check("rwhisk-functorial", lhs == rhs, a, B[None, :], Kk[:, None], kinds=(2, 2, 1))
        sel = pair_by_src[y]
        ph, pk = fi[sel], gi[sel]
        check(
            "lwhisk-comp1",
            T.LW[pk, T.LW[ph, a]] == T.LW[T.C1[ph, pk], a],
            pk, ph, a, kinds=(1, 1, 2),
        )
        sel = pair_by_tgt[x]
        pf, pg = fi[sel], gi[sel]
        check(
            "rwhisk-comp1",
            T.RW[T.RW[a, pg], pf] == T.RW[a, T.C1[pf, pg]],
            a, pg, pf, kinds=(2, 1, 1),
        )
        lhs = T.LW[H[:, None], T.RW[a, Kk][None, :]]
        rhs = T.RW[T.LW[H, a][:, None], Kk[None, :]]
        check("whisk-mixed", lhs == rhs, H[:, None], a, Kk[None, :], kinds=(1, 2, 1))
        # interchange: (b*g).(h*a) == (k*a).(b*f) for b out of y
        Bs = T.cells_from[y]
        if Bs.size:
            f, g = T.S2[a], T.T2[a]
            h, k = T.S2[Bs], T.T2[Bs]
            lhs = T.vc(T.RW[Bs, g], T.LW[h, a])
            rhs = T.vc(T.LW[k, a], T.RW[Bs, f])
            check("interchange", lhs == rhs, a, Bs, kinds=(2, 2))
    return rep
