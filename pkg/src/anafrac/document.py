"""The line-oriented 2-site text format.

A document is a header line followed by sections. Each section starts with a
``[name]`` line and holds one whitespace-separated row per entry::

    anafrac-site 1
    name codiscrete(2)
    [objects]      x
    [onecells]     f src tgt
    [id1]          x f
    [comp1]        f g g.f
    [twocells]     a f g
    [id2]          f a
    [vcomp]        a b a.b
    [lwhisk]       h a h*a
    [rwhisk]       a k a*k
    [covers]       j
    [pullbacks]    cover other apex pr_cover pr_other

Blank lines and lines whose first non-blank character is ``#`` are ignored.
Identifiers are runs of non-blank characters that do not start with ``#``
or ``[``. The full grammar is in ``docs/site-format.md``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .site import PullbackSquare, Site
from .twocat import TabulatedTwoCategory

FORMAT_NAME = "anafrac-site"
FORMAT_VERSION = 1

# section -> column kinds; "O" object, "1" 1-cell, "2" 2-cell. Upper case
# marks the column that declares a new identifier.
SECTIONS = {
    "objects": ("O*",),
    "onecells": ("1*", "O", "O"),
    "id1": ("O", "1"),
    "comp1": ("1", "1", "1"),
    "twocells": ("2*", "1", "1"),
    "id2": ("1", "2"),
    "vcomp": ("2", "2", "2"),
    "lwhisk": ("1", "2", "2"),
    "rwhisk": ("2", "1", "2"),
    "covers": ("1",),
    "pullbacks": ("1", "1", "O", "1", "1"),
}
# number of leading columns forming the row's key
KEYS = {
    "objects": 1, "onecells": 1, "id1": 1, "comp1": 2, "twocells": 1, "id2": 1,
    "vcomp": 2, "lwhisk": 2, "rwhisk": 2, "covers": 1, "pullbacks": 2,
}
KIND_NAMES = {"O": "object", "1": "1-cell", "2": "2-cell"}


class ParseError(Exception):
    """Malformed input, located by 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line else message)


class ReferenceError(ParseError):  # noqa: A001 - the name used by the format docs
    """An identifier used without being declared."""

    def __init__(self, identifier: str, kind: str, line: int, column: int):
        self.identifier = identifier
        self.kind = kind
        super().__init__(f"undeclared {kind} {identifier!r}", line, column)


@dataclass
class SiteDocument:
    """A 2-site as data: one list of rows per section, in document order."""

    name: str = ""
    objects: list = field(default_factory=list)
    onecells: list = field(default_factory=list)
    id1: list = field(default_factory=list)
    comp1: list = field(default_factory=list)
    twocells: list = field(default_factory=list)
    id2: list = field(default_factory=list)
    vcomp: list = field(default_factory=list)
    lwhisk: list = field(default_factory=list)
    rwhisk: list = field(default_factory=list)
    covers: list = field(default_factory=list)
    pullbacks: list = field(default_factory=list)

    def rows(self, section: str) -> list:
        return getattr(self, section)


# ---------------------------------------------------------------------------
# parsing


def _tokens(line: str):
    """Yield ``(column, token)`` for the blank-separated tokens of ``line``."""
    i, n = 0, len(line)
    while i < n:
        while i < n and line[i].isspace():
            i += 1
        start = i
        while i < n and not line[i].isspace():
            i += 1
        if i > start:
            yield start + 1, line[start:i]


def parse_site(text: str) -> SiteDocument:
    """Parse a document; every failure is a :class:`ParseError`."""
    if not isinstance(text, str):
        raise ParseError("document must be text")
    doc = SiteDocument()
    lines = text.splitlines()
    located: dict = {s: [] for s in SECTIONS}  # rows with token positions
    header_seen = False
    section = None
    seen_sections: set = set()
    for lineno, line in enumerate(lines, 1):
        toks = list(_tokens(line))
        if not toks or toks[0][1].startswith("#"):
            continue
        col, first = toks[0]
        if not header_seen:
            if first != FORMAT_NAME or len(toks) != 2:
                raise ParseError(f"expected header '{FORMAT_NAME} {FORMAT_VERSION}'", lineno, col)
            if toks[1][1] != str(FORMAT_VERSION):
                raise ParseError(f"unsupported format version {toks[1][1]!r}", lineno, toks[1][0])
            header_seen = True
            continue
        if first.startswith("["):
            if len(toks) != 1 or not first.endswith("]"):
                raise ParseError("malformed section header", lineno, col)
            sec = first[1:-1]
            if sec not in SECTIONS:
                raise ParseError(f"unknown section {sec!r}", lineno, col)
            if sec in seen_sections:
                raise ParseError(f"section {sec!r} appears twice", lineno, col)
            seen_sections.add(sec)
            section = sec
            continue
        if section is None:
            if first == "name":
                if len(toks) != 2:
                    raise ParseError("'name' takes exactly one token", lineno, col)
                if doc.name:
                    raise ParseError("'name' given twice", lineno, col)
                doc.name = toks[1][1]
                continue
            raise ParseError(f"unexpected {first!r} before the first section", lineno, col)
        arity = len(SECTIONS[section])
        if len(toks) != arity:
            where = toks[arity][0] if len(toks) > arity else len(line) + 1
            raise ParseError(
                f"[{section}] rows have {arity} fields, found {len(toks)}", lineno, where
            )
        for c, tok in toks:
            if tok.startswith("[") or tok.startswith("#"):
                raise ParseError(f"identifier may not start with {tok[0]!r}", lineno, c)
        located[section].append((lineno, toks))
    if not header_seen:
        raise ParseError(f"missing header '{FORMAT_NAME} {FORMAT_VERSION}'", len(lines) or 1, 1)
    _resolve(doc, located)
    return doc


def _resolve(doc: SiteDocument, located: dict) -> None:
    declared = {"O": {}, "1": {}, "2": {}}
    # declarations first, so sections may come in any order
    for section, kinds in SECTIONS.items():
        for lineno, toks in located[section]:
            for kind, (col, tok) in zip(kinds, toks):
                if kind.endswith("*"):
                    k = kind[0]
                    if tok in declared[k]:
                        raise ParseError(f"{KIND_NAMES[k]} {tok!r} declared twice", lineno, col)
                    declared[k][tok] = (lineno, col)
    for section, kinds in SECTIONS.items():
        keys: set = set()
        for lineno, toks in located[section]:
            for kind, (col, tok) in zip(kinds, toks):
                k = kind[0]
                if tok not in declared[k]:
                    raise ReferenceError(tok, KIND_NAMES[k], lineno, col)
            key = tuple(t for _, t in toks[: KEYS[section]])
            if key in keys:
                raise ParseError(f"duplicate [{section}] entry for {' '.join(key)}", lineno, toks[0][0])
            keys.add(key)
            row = tuple(t for _, t in toks)
            doc.rows(section).append(row[0] if len(kinds) == 1 else row)


# ---------------------------------------------------------------------------
# serialization


def serialize_site(doc: SiteDocument) -> str:
    """Canonical text; ``parse_site(serialize_site(d)) == d``."""
    out = [f"{FORMAT_NAME} {FORMAT_VERSION}"]
    if doc.name:
        out.append(f"name {doc.name}")
    for section, kinds in SECTIONS.items():
        out.append(f"[{section}]")
        for row in doc.rows(section):
            out.append(row if len(kinds) == 1 else " ".join(row))
    return "\n".join(out) + "\n"


def digest(doc: SiteDocument) -> str:
    return hashlib.sha256(serialize_site(doc).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# conversion


def document_from_site(site: Site) -> SiteDocument:
    """Tabulate ``site`` under the names its 2-category gives its cells."""
    K = site.base
    T = TabulatedTwoCategory.materialize(K)
    n = K.name
    doc = SiteDocument(name=site.name)
    doc.objects = [n(x) for x in T.objects]
    doc.onecells = [(n(f), n(T.src(f)), n(T.tgt(f))) for f in T.onecells()]
    doc.id1 = [(n(x), n(T.id1(x))) for x in T.objects]
    doc.comp1 = [(n(f), n(g), n(h)) for (f, g), h in T.comp1_table.items()]
    doc.twocells = [(n(a), n(T.src1(a)), n(T.tgt1(a))) for a in T.twocells()]
    doc.id2 = [(n(f), n(a)) for f, a in T.id2_table.items()]
    doc.vcomp = [(n(a), n(b), n(c)) for (a, b), c in T.vcomp_table.items()]
    doc.lwhisk = [(n(h), n(a), n(c)) for (h, a), c in T.lwhisk_table.items()]
    doc.rwhisk = [(n(a), n(k), n(c)) for (a, k), c in T.rwhisk_table.items()]
    doc.covers = sorted(n(j) for j in site.covers)
    doc.pullbacks = [
        (n(sq.cover), n(sq.other), n(sq.apex), n(sq.pr_cover), n(sq.pr_other))
        for sq in site.assigned_squares()
    ]
    for section in ("objects", "onecells", "twocells"):
        names = [r if isinstance(r, str) else r[0] for r in doc.rows(section)]
        if len(set(names)) != len(names):
            raise ValueError(f"{section} names are not unique; cannot serialize")
    return doc


def site_from_document(doc: SiteDocument) -> Site:
    """Build a tabulated site. Missing table entries surface on validation."""
    K = TabulatedTwoCategory(
        doc.objects,
        {f: (s, t) for f, s, t in doc.onecells},
        {a: (f, g) for a, f, g in doc.twocells},
        {(f, g): h for f, g, h in doc.comp1},
        dict(doc.id1),
        {(a, b): c for a, b, c in doc.vcomp},
        dict(doc.id2),
        {(h, a): c for h, a, c in doc.lwhisk},
        {(a, k): c for a, k, c in doc.rwhisk},
    )
    squares = {
        (j, f): PullbackSquare(j, f, apex, pr_other, pr_cover)
        for j, f, apex, pr_cover, pr_other in doc.pullbacks
    }
    return Site(K, doc.covers, squares, name=doc.name or "site")
