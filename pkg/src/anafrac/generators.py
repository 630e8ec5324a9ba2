"""Built-in example sites.

* ``trivial(carrier)``: covers are the identities only.
* ``codiscrete(N)``: codiscrete groupoids ``E1, E2, E4, ...`` (carrier sizes
  powers of two up to ``N``), signed coordinate functors, covers the
  surjective ones, pullbacks the fibre products whose size stays within ``N``.
* ``directed(cap)``: ``1``, the walking arrow ``2``, ``E2`` and the products
  ``E2^a x 2^b`` (``b <= 1``, size ``<= cap``) reached by pulling covers back,
  with coordinate functors; covers are the fully faithful functors that are
  surjective on objects.
* ``monoid``: a tabulated carrier with a non-commutative hom-category, used as
  ``trivial(monoid)``.
"""

from __future__ import annotations

import re

from .coordinate import CoordinateTwoCategory, Shape, coordinate_pullback
from .fincat import (
    monoid_category,
    poset_category,
    terminal_category,
    two_category_of,
    walking_arrow,
)
from .site import PullbackSquare, Site
from .twocat import CapExceeded, TabulatedTwoCategory, TwoCategory

MAX_GENERATED_SIZE = 64


def _coordinate_site(K: CoordinateTwoCategory, name: str) -> Site:
    covers = [f for f in K.onecells() if K.is_cover_shape(f)]

    def assign(j, f):
        if j not in K_covers:
            return None
        if j == K.id1(j[1]):
            return PullbackSquare(j, f, f[0], K.id1(f[0]), f)
        if f == K.id1(f[1]):
            return PullbackSquare(j, f, j[0], j, K.id1(j[0]))
        out = coordinate_pullback(K, j, f)
        if out is None:
            return None
        apex, pr_other, pr_cover = out
        return PullbackSquare(j, f, apex, pr_other, pr_cover)

    K_covers = frozenset(covers)
    return Site(K, covers, assign, name=name)


def codiscrete(n: int) -> Site:
    if n < 1 or n > MAX_GENERATED_SIZE:
        raise CapExceeded(f"codiscrete size {n} outside 1..{MAX_GENERATED_SIZE}")
    shapes = {}
    a = 0
    while 2**a <= n:
        shapes[f"E{2**a}"] = Shape(a, 0)
        a += 1
    K = CoordinateTwoCategory(shapes, signed=True, e_constants=True)
    K.check_caps()
    return _coordinate_site(K, f"codiscrete({n})")


def directed_name(s: Shape) -> str:
    parts = []
    if s.a:
        parts.append(f"E{2**s.a}")
    if s.b:
        parts.append("2")
    return "x".join(parts) or "1"


def directed(cap: int = 8) -> Site:
    if cap < 4 or cap > MAX_GENERATED_SIZE:
        raise CapExceeded(f"directed cap {cap} outside 4..{MAX_GENERATED_SIZE}")
    shapes = {}
    for total in range(0, cap.bit_length()):
        for b in (0, 1):
            a = total - b
            if a >= 0 and 2**total <= cap:
                s = Shape(a, b)
                shapes[directed_name(s)] = s
    K = CoordinateTwoCategory(shapes, signed=False, e_constants=False)
    K.check_caps()
    return _coordinate_site(K, f"directed({cap})")


def trivial(K: TwoCategory, name: str = "trivial") -> Site:
    return Site(K, [K.id1(x) for x in K.objects], {}, name=name)


def terminal_two_category() -> TabulatedTwoCategory:
    return TabulatedTwoCategory(
        ["*"],
        {"1*": ("*", "*")},
        {"11*": ("1*", "1*")},
        {("1*", "1*"): "1*"},
        {"*": "1*"},
        {("11*", "11*"): "11*"},
        {"1*": "11*"},
        {("1*", "11*"): "11*"},
        {("11*", "1*"): "11*"},
    )


def transformation_monoid():
    """Endomaps of ``{0, 1}``: identity, swap and the two constants."""
    elems = ("id", "sw", "c0", "c1")
    table = {"id": (0, 1), "sw": (1, 0), "c0": (0, 0), "c1": (1, 1)}
    back = {v: k for k, v in table.items()}

    def mult(a, b):  # a after b
        fa, fb = table[a], table[b]
        return back[(fa[fb[0]], fa[fb[1]])]

    return monoid_category("BM", elems, mult, "id")


def monoid_two_category() -> tuple[TabulatedTwoCategory, dict]:
    return two_category_of([terminal_category(), transformation_monoid()])


def arrow_square_two_category() -> tuple[TabulatedTwoCategory, dict]:
    """``1``, ``2`` and ``2 x 2`` with all functors: a non-ff arrow with a kernel pair."""
    cells = [(p, q) for p in (0, 1) for q in (0, 1)]
    square = poset_category("2x2", cells, lambda s, t: s[0] <= t[0] and s[1] <= t[1])
    return two_category_of([terminal_category(), walking_arrow(), square])


_SPEC = re.compile(r"^(\w+)(?:\((\w*)\))?$")


def generate_example(spec: str) -> Site:
    """Build a site from ``trivial(carrier)``, ``codiscrete(N)`` or ``directed(cap)``."""
    m = _SPEC.match(spec.strip())
    if not m:
        raise ValueError(f"cannot parse example name {spec!r}")
    kind, arg = m.group(1), m.group(2)
    if kind == "codiscrete":
        return codiscrete(int(arg or 4))
    if kind == "directed":
        return directed(int(arg or 8))
    if kind == "trivial":
        arg = arg or "terminal"
        if arg == "terminal":
            return trivial(terminal_two_category(), "trivial(terminal)")
        if arg == "monoid":
            return trivial(monoid_two_category()[0], "trivial(monoid)")
        inner = re.match(r"^(codiscrete|directed)(\d+)$", arg)
        if inner:
            carrier = generate_example(f"{inner.group(1)}({inner.group(2)})").base
            return trivial(carrier, f"trivial({arg})")
        raise ValueError(f"unknown trivial carrier {arg!r}")
    raise ValueError(f"unknown example {kind!r}")
