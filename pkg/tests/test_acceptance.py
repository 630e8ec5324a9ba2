"""Acceptance criteria 1-8.

Each test prints one ``ACCEPTANCE n PASS|FAIL`` line with its runtime and a
short summary, then asserts. Runtime limits are part of each criterion.
Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import os
import subprocess
import sys
import time

import pytest

from anafrac.fractions import compose_fractions, enumerate_fractions, identity_fraction
from anafrac.generators import generate_example
from anafrac.localise import aj_one, is_equivalence_in_KJ, is_weak_equivalence
from anafrac.mutation import CARRIER_TABLES, SITE_TABLES, mutations, violations_after
from anafrac.site import validate_site
from anafrac.suites import characterisation_headroom, run_suite
from anafrac.twocat import validate_two_category

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(n, ok, elapsed, limit, detail):
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        note = "" if within else f" (over the {limit:.0f} s limit)"
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {status} [{elapsed:.1f} s]{note}: {detail}")
        assert ok, detail
        assert within, f"criterion {n} took {elapsed:.1f} s, limit {limit} s"

    return emit


def run_suites(pairs):
    out = []
    for suite, name in pairs:
        out.append(run_suite(suite, generate_example(name)))
    return out


def summarise(results):
    bad = [r.summary() for r in results if not r.ok]
    total = sum(sum(r.checked.values()) for r in results)
    return not bad, f"{len(results)} suite runs, {total} instances checked" + (f"; {bad}" if bad else "")


# ---------------------------------------------------------------------------


MUTATION_PLAN = {
    # site: (carrier mutations per table, site-table mutations per table); None = every entry
    "trivial(terminal)": (None, None),
    "trivial(monoid)": (None, None),
    "codiscrete(4)": (1, 5),
    "directed(4)": (None, None),
    "directed(8)": (1, 5),
}


@pytest.mark.parametrize("name", list(MUTATION_PLAN))
def test_criterion_1_site_validation(name, report):
    t0 = time.perf_counter()
    S = generate_example(name)
    carrier, site = validate_two_category(S.base), validate_site(S)
    per_carrier, per_site = MUTATION_PLAN[name]
    ms = mutations(S, per_carrier, tables=CARRIER_TABLES) + mutations(S, per_site, tables=SITE_TABLES)
    missed = [m.describe(S.base) for m in ms if not violations_after(S, m)]
    elapsed = time.perf_counter() - t0
    ok = carrier.ok and site.ok and not missed
    detail = (
        f"{name}: {len(carrier.violations)}+{len(site.violations)} violations on the site, "
        f"{len(ms) - len(missed)}/{len(ms)} mutations detected"
    )
    report("1", ok, elapsed, 10, detail + (f"; missed {missed[:3]}" if missed else ""))


def test_criterion_2_hom_categories(report):
    t0 = time.perf_counter()
    results = run_suites(
        ("category-axioms", n) for n in ("codiscrete(4)", "directed(4)", "directed(8)", "trivial(monoid)")
    )
    elapsed = time.perf_counter() - t0
    ok, detail = summarise(results)
    trivial = results[-1]
    iso = all(trivial.checked[k] > 0 for k in ("iso-objects", "iso-arrows", "iso-composition"))
    report("2", ok and iso, elapsed, 60, detail + f"; trivial-site isomorphism checked: {iso}")


def test_criterion_3_whiskering(report):
    t0 = time.perf_counter()
    results = run_suites([("whisker-functorial", "codiscrete(8)"), ("appendix", "codiscrete(8)")])
    elapsed = time.perf_counter() - t0
    ok, detail = summarise(results)
    replayed = results[1].notes.get("replayed", {})
    chains = replayed.get("left-whisker-I", 0) > 0 and replayed.get("left-whisker-II", 0) > 0
    report("3", ok and chains, elapsed, 300, detail + f"; chains replayed {replayed}")


def test_criterion_4_interchange_and_coherence(report):
    t0 = time.perf_counter()
    sites = ("trivial(monoid)", "codiscrete(4)", "codiscrete(8)", "directed(8)")
    results = run_suites((s, n) for n in sites for s in ("interchange", "pentagon"))
    ok, detail = summarise(results)
    strict = 0
    for name in ("codiscrete(4)", "directed(8)"):
        S = generate_example(name)
        for x in S.base.objects:
            for y in S.base.objects:
                ix, iy = identity_fraction(S, x), identity_fraction(S, y)
                for F in enumerate_fractions(S, x, y):
                    ok &= compose_fractions(S, ix, F) == F == compose_fractions(S, F, iy)
                    strict += 1
    elapsed = time.perf_counter() - t0
    report("4", ok, elapsed, 300, detail + f"; strict unitality on {strict} fractions")


def test_criterion_5_aj(report):
    t0 = time.perf_counter()
    results = run_suites(("aj", n) for n in ("trivial(monoid)", "codiscrete(4)", "directed(8)"))
    elapsed = time.perf_counter() - t0
    ok, detail = summarise(results)
    ff = all(r.checked["locally-ff"] == len(generate_example(r.site).base.objects) ** 2 for r in results)
    report("5", ok and ff, elapsed, 60, detail + f"; locally ff on every object pair: {ff}")


def test_criterion_6_characterisation(report):
    t0 = time.perf_counter()
    results = run_suites([("characterisation", "codiscrete(4)"), ("characterisation", "directed(8)")])
    ok, detail = summarise(results)
    c4 = results[0].notes["agreement"]
    all_true = c4["neither"] == 0 and c4["both"] == len(list(generate_example("codiscrete(4)").base.onecells()))
    D = characterisation_headroom(generate_example("directed(8)"))
    bang = next(f for f in D.base.hom("2", "1"))
    we, _ = is_weak_equivalence(D, bang)
    eq, _ = is_equivalence_in_KJ(D, aj_one(D, bang))
    elapsed = time.perf_counter() - t0
    detail += f"; codiscrete(4) all true: {all_true}; 2->1 weak equivalence={we}, equivalence={eq}"
    report("6", ok and all_true and not we and not eq, elapsed, 300, detail)


def test_criterion_7_ef(report):
    t0 = time.perf_counter()
    names = ("trivial(terminal)", "trivial(monoid)", "codiscrete(2)", "codiscrete(4)", "codiscrete(8)",
             "directed(4)", "directed(8)")
    results = run_suites(("ef", n) for n in names)
    elapsed = time.perf_counter() - t0
    ok, detail = summarise(results)
    ef2 = all(r.checked["EF2"] > 0 and not r.failed["EF2"] for r in results)
    report("7", ok and ef2, elapsed, 60, detail + f"; EF2 strict equalities: {sum(r.checked['EF2'] for r in results)}")


def test_criterion_8_determinism(report, tmp_path):
    t0 = time.perf_counter()
    doc = tmp_path / "directed4.site"
    out = subprocess.run([sys.executable, "-m", "anafrac.cli", "example", "directed(4)"],
                         capture_output=True, check=True)
    doc.write_bytes(out.stdout)
    reports = []
    for seed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        res = subprocess.run(
            [sys.executable, "-m", "anafrac.cli", "--site", str(doc), "--format", "machine", "--no-timing",
             "--jobs", "4", "check", "all"],
            capture_output=True, env=env,
        )
        reports.append((res.returncode, res.stdout))
    elapsed = time.perf_counter() - t0
    (c1, r1), (c2, r2) = reports
    same = r1 == r2
    report("8", same and c1 == c2 == 0, elapsed, 600,
           f"exit codes {c1}, {c2}; {len(r1)} report bytes; byte-identical: {same}")
