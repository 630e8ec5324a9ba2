"""Named check suites and the scopes they run on by default.

The default scopes keep each suite on the built-in sites within a few
minutes; any other site runs unrestricted unless a scope is passed.
"""

from __future__ import annotations

import re
from dataclasses import replace
from typing import Optional

from .checks import (
    Scope,
    suite_appendix,
    suite_category_axioms,
    suite_interchange,
    suite_pentagon,
    suite_whisker_functorial,
)
from .generators import MAX_GENERATED_SIZE, directed
from .localise import (
    check_aj_strict_2functor,
    check_characterisation,
    check_EF_conditions,
    check_locally_ff_all,
)
from .report import SuiteResult
from .site import Site

SUITE_NAMES = (
    "aj",
    "appendix",
    "category-axioms",
    "characterisation",
    "ef",
    "interchange",
    "pentagon",
    "whisker-functorial",
)

_SMALL = ("E1", "E2")
DEFAULT_SCOPES = {
    "codiscrete(8)": {
        "category-axioms": Scope(_SMALL),
        "whisker-functorial": Scope(_SMALL, 4, 2),
        "appendix": Scope(_SMALL, 2, 2),
        "interchange": Scope(_SMALL, 2),
        "pentagon": Scope(_SMALL, 2),
    },
    "codiscrete(4)": {
        "whisker-functorial": Scope(None, 2, 2),
        "appendix": Scope(None, 2, 2),
        "interchange": Scope(None, 2),
        "pentagon": Scope(None, 2),
    },
    "directed(8)": {
        "whisker-functorial": Scope(("1", "E2", "2"), 4, 2),
        "appendix": Scope(("1", "E2", "2"), 4, 2),
        "interchange": Scope(("1", "E2", "2"), 4),
        "pentagon": Scope(("1", "E2", "2"), 4),
    },
}


def default_scope(suite: str, site: Site) -> Scope:
    return DEFAULT_SCOPES.get(site.name, {}).get(suite, Scope())


def characterisation_headroom(site: Site) -> Optional[Site]:
    """A larger generated site containing ``site`` with the same pullbacks.

    In ``directed(cap)`` the largest objects only have pseudoinverses through
    apexes above ``cap``; ``directed(2 cap)`` supplies them.
    """
    m = re.fullmatch(r"directed\((\d+)\)", site.name)
    if m and 2 * int(m.group(1)) <= MAX_GENERATED_SIZE:
        return directed(2 * int(m.group(1)))
    return None


def run_suite(
    name: str,
    site: Site,
    *,
    scope: Optional[Scope] = None,
    apex_cap: Optional[int] = None,
    seed: int = 0,
) -> SuiteResult:
    """Run one suite. ``apex_cap`` overrides the scope's apex bound."""
    if name not in SUITE_NAMES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    if scope is None:
        scope = default_scope(name, site)
    if apex_cap is not None:
        scope = replace(scope, apex=apex_cap)
    if name == "aj":
        res = check_aj_strict_2functor(site, seed=seed)
        ff = check_locally_ff_all(site)
        res.merge(ff)
        res.elapsed += ff.elapsed
    elif name == "characterisation":
        search = characterisation_headroom(site)
        objects = scope.objects
        if search is not None:
            objects = objects or tuple(site.base.objects)
        res = check_characterisation(search or site, apex_cap, objects=objects)
        res.site = site.name
        if search is not None:
            res.notes["search_site"] = search.name
    elif name == "ef":
        res = check_EF_conditions(site)
    else:
        fn = {
            "appendix": suite_appendix,
            "category-axioms": suite_category_axioms,
            "interchange": suite_interchange,
            "pentagon": suite_pentagon,
            "whisker-functorial": suite_whisker_functorial,
        }[name]
        res = fn(site, scope, seed=seed)
    res.suite = name
    return res
