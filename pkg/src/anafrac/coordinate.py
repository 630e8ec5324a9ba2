"""Locally posetal 2-categories of products of codiscrete pairs and arrows.

Objects are finite categories ``E2^a x 2^b`` (``E2`` the codiscrete groupoid
on two objects, ``2`` the walking arrow). An object of ``E2^a x 2^b`` is a pair
of bit-vectors. 1-cells are *coordinate functors*: each output coordinate is
a constant or copies one input coordinate (E-coordinates optionally negated).
Between two such functors there is at most one natural transformation, and it
exists iff the ``2``-coordinates are pointwise ordered, so a 2-cell is simply
the pair ``(source, target)``.

Codes for one output coordinate:

* E-output: ``0``/``1`` constant, ``2 + 2*i + s`` for input E-coordinate ``i``
  with negation bit ``s``.
* 2-output: ``0``/``1`` constant, ``2 + i`` for input 2-coordinate ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .twocat import TwoCategory


@dataclass(frozen=True)
class Shape:
    a: int  # codiscrete E2 factors
    b: int  # walking-arrow factors

    @property
    def size(self) -> int:
        return 2 ** (self.a + self.b)

    def elements(self):
        for e in product((0, 1), repeat=self.a):
            for t in product((0, 1), repeat=self.b):
                yield e, t


class CoordinateTwoCategory(TwoCategory):
    """Formula-driven 2-category of coordinate functors.

    ``signed`` allows negated E-coordinates, ``e_constants`` allows constant
    E-outputs; 2-outputs may always be constant.
    """

    def __init__(self, shapes: dict, *, signed: bool, e_constants: bool):
        self.shapes = dict(shapes)  # name -> Shape
        self.objects = tuple(shapes)
        self._by_shape = {s: n for n, s in shapes.items()}
        self.signed = signed
        self.e_constants = e_constants
        self._hom_cache: dict = {}
        self._hom_sets: dict = {}

    # 1-cells are (src, tgt, codes) with codes = E-codes followed by 2-codes
    def _choices(self, s: Shape, t: Shape):
        e = [0, 1] if self.e_constants else []
        for i in range(s.a):
            e.append(2 + 2 * i)
            if self.signed:
                e.append(3 + 2 * i)
        two = [0, 1] + [2 + i for i in range(s.b)]
        return [e] * t.a + [two] * t.b

    def hom(self, x, y):
        key = (x, y)
        if key not in self._hom_cache:
            choices = self._choices(self.shapes[x], self.shapes[y])
            self._hom_cache[key] = tuple((x, y, c) for c in product(*choices))
        return self._hom_cache[key]

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]

    def id1(self, x):
        s = self.shapes[x]
        return (x, x, tuple(2 + 2 * i for i in range(s.a)) + tuple(2 + i for i in range(s.b)))

    def comp1(self, f, g):
        return _compose(f, g, self.shapes[f[1]].a, self.shapes[g[1]].a)

    def is_onecell(self, f):
        try:
            x, y, _ = f
            if x not in self.shapes or y not in self.shapes:
                return False
        except (TypeError, ValueError):
            return False
        key = (x, y)
        if key not in self._hom_sets:
            self._hom_sets[key] = frozenset(self.hom(x, y))
        return f in self._hom_sets[key]

    def le(self, f, g) -> bool:
        na = self.shapes[f[1]].a
        for p, q in zip(f[2][na:], g[2][na:]):
            if p != q and p != 0 and q != 1:
                return False
        return True

    def locally_thin(self) -> bool:
        return True

    def object_size(self, x) -> int:
        return self.shapes[x].size

    def ff_hint(self, f):
        """``True`` when every hom-category is codiscrete, else undecided."""
        if all(s.b == 0 for s in self.shapes.values()):
            return True
        return None

    def cells_between(self, f, g):
        return ((f, g),) if self.le(f, g) else ()

    def src1(self, a):
        return a[0]

    def tgt1(self, a):
        return a[1]

    def id2(self, f):
        return (f, f)

    def vcomp(self, a, b):
        return (b[0], a[1])

    def lwhisk(self, h, a):
        return (self.comp1(a[0], h), self.comp1(a[1], h))

    def rwhisk(self, a, k):
        return (self.comp1(k, a[0]), self.comp1(k, a[1]))

    def is_twocell(self, a):
        try:
            f, g = a
        except (TypeError, ValueError):
            return False
        return self.is_onecell(f) and self.is_onecell(g) and f[:2] == g[:2] and self.le(f, g)

    def name(self, cell) -> str:
        if isinstance(cell, tuple) and len(cell) == 2 and isinstance(cell[0], tuple):
            return f"{self.name(cell[0])}=>{self.name(cell[1])}"
        if isinstance(cell, tuple) and len(cell) == 3:
            x, y, codes = cell
            return f"{x}->{y}[{self.code_string(y, codes)}]"
        return str(cell)

    def code_string(self, y, codes) -> str:
        na = self.shapes[y].a
        parts = []
        for k, c in enumerate(codes):
            if c < 2:
                parts.append(str(c))
            elif k < na:
                i, s = divmod(c - 2, 2)
                parts.append(("~e" if s else "e") + str(i))
            else:
                parts.append("t" + str(c - 2))
        return ",".join(parts)

    # -- semantics -------------------------------------------------------
    def apply(self, f, element):
        """Evaluate the functor ``f`` on an object (bit-vector pair)."""
        e, t = element
        na = self.shapes[f[1]].a
        out_e, out_t = [], []
        for k, c in enumerate(f[2]):
            if k < na:
                out_e.append(c if c < 2 else e[(c - 2) // 2] ^ ((c - 2) % 2))
            else:
                out_t.append(c if c < 2 else t[c - 2])
        return tuple(out_e), tuple(out_t)

    def is_cover_shape(self, f) -> bool:
        """Fully faithful and surjective on objects."""
        s, t = self.shapes[f[0]], self.shapes[f[1]]
        e_codes, t_codes = f[2][: t.a], f[2][t.a :]
        if any(c < 2 for c in f[2]):
            return False
        e_idx = [(c - 2) // 2 for c in e_codes]
        t_idx = [c - 2 for c in t_codes]
        return len(set(e_idx)) == len(e_idx) and sorted(t_idx) == list(range(s.b))

    def shape_object(self, shape: Shape):
        return self._by_shape.get(shape)


@lru_cache(maxsize=None)
def _compose(f, g, na_mid, na_out):
    fc = f[2]
    out = []
    for k, c in enumerate(g[2]):
        if k < na_out:
            if c < 2:
                out.append(c)
            else:
                out.append(fc[(c - 2) >> 1] ^ (c & 1))
        else:
            out.append(c if c < 2 else fc[na_mid + c - 2])
    return (f[0], g[1], tuple(out))


def coordinate_pullback(K: CoordinateTwoCategory, j, f):
    """Fibre product of the cover ``j: u -> X`` along ``f: B -> X``.

    Returns ``(apex, pr_other, pr_cover)`` or ``None`` when the apex shape is
    not an object of ``K``. Identity normalization is left to the caller.
    """
    u, X, B = K.shapes[j[0]], K.shapes[j[1]], K.shapes[f[0]]
    free = u.a - X.a
    apex = Shape(B.a + free, B.b)
    name = K.shape_object(apex)
    if name is None:
        return None
    pr_other = tuple(2 + 2 * i for i in range(B.a)) + tuple(2 + i for i in range(B.b))
    e_out = [None] * u.a
    for i, c in enumerate(j[2][: X.a]):
        sigma, s = divmod(c - 2, 2)
        e_out[sigma] = f[2][i] ^ s
    r = 0
    for m in range(u.a):
        if e_out[m] is None:
            e_out[m] = 2 + 2 * (B.a + r)
            r += 1
    t_out = [None] * u.b
    for k, c in enumerate(j[2][X.a :]):
        t_out[c - 2] = f[2][X.a + k]
    return name, (name, f[0], pr_other), (name, j[0], tuple(e_out) + tuple(t_out))
