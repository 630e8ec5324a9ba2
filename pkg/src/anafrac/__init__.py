"""Bicategories of fractions of finite strict 2-sites, built and checked exhaustively."""

from .document import SiteDocument, parse_site, serialize_site
from .fractions import (
    Fraction,
    FractionMap,
    build_hom_category,
    compose_fractions,
    enumerate_fractions,
    identity_fraction,
    make_fraction,
    vcompose_maps,
)
from .generators import codiscrete, directed, generate_example, trivial
from .site import MissingPullback, Site, pullback, validate_site
from .suites import SUITE_NAMES, run_suite
from .twocat import CapExceeded, TabulatedTwoCategory, TwoCategory, validate_two_category
from .whisker import associator, hcompose_maps, left_whisker, right_whisker

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "Fraction",
    "FractionMap",
    "MissingPullback",
    "SUITE_NAMES",
    "Site",
    "SiteDocument",
    "TabulatedTwoCategory",
    "TwoCategory",
    "associator",
    "build_hom_category",
    "codiscrete",
    "compose_fractions",
    "directed",
    "enumerate_fractions",
    "generate_example",
    "hcompose_maps",
    "identity_fraction",
    "left_whisker",
    "make_fraction",
    "parse_site",
    "pullback",
    "right_whisker",
    "run_suite",
    "serialize_site",
    "trivial",
    "validate_site",
    "validate_two_category",
    "vcompose_maps",
]
