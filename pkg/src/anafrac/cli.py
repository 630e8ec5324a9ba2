"""Command-line interface: ``anafrac [site options] COMMAND ...``.

Exit codes (stable):

==  =====================================================
0   every requested check passed
1   a check failed
2   usage error (bad flags, unknown identifier or example)
3   the site document could not be parsed
4   the site is not a valid 2-site (tables or laws)
5   a construction needed a pullback the site lacks
6   a size cap was exceeded
7   any other construction error
==  =====================================================
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .document import (
    FORMAT_VERSION,
    ParseError,
    digest,
    parse_site,
    serialize_site,
    site_from_document,
    document_from_site,
)
from .fractions import (
    build_hom_category,
    compose_fractions,
    enumerate_fractions,
    fraction_name,
    make_fraction,
    map_name,
    maps_between,
    vcompose_with_trace,
)
from .generators import generate_example
from .site import MissingPullback, Site, validate_site
from .suites import SUITE_NAMES, run_suite
from .twocat import CapExceeded, MalformedTable, TwoCatError, validate_two_category
from .whisker import left_whisker, left_whisker_I, left_whisker_II, right_whisker

REPORT_SCHEMA = "anafrac-report"
REPORT_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVALID = 4
EXIT_MISSING_PULLBACK = 5
EXIT_CAP = 6
EXIT_CONSTRUCTION = 7


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# site loading


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        before = data[: exc.start]
        line = before.count(b"\n") + 1
        col = exc.start - (before.rfind(b"\n") + 1) + 1
        raise ParseError("invalid UTF-8", line, col) from None


def example_digest(name: str) -> str:
    return hashlib.sha256(f"anafrac-example {FORMAT_VERSION} {name}".encode()).hexdigest()


def load_site(args) -> tuple[Site, dict, tuple]:
    """The site named by the options, its report header and a job payload."""
    if args.site and args.example:
        raise UsageError("give either --site or --example, not both")
    if args.site:
        try:
            data = Path(args.site).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {args.site}: {exc.strerror}") from None
        text = _decode(data)
        doc = parse_site(text)
        site = site_from_document(doc)
        site.base.check_caps()
        info = {"source": "document", "name": site.name, "digest": digest(doc)}
        return site, info, ("document", text)
    name = args.example or "trivial(terminal)"
    try:
        site = generate_example(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    info = {"source": "example", "name": site.name, "digest": example_digest(site.name)}
    return site, info, ("example", name)


def _site_from_payload(payload: tuple) -> Site:
    kind, value = payload
    if kind == "document":
        return site_from_document(parse_site(value))
    return generate_example(value)


class Names:
    """Resolve user-supplied identifiers to cells of the carrier."""

    def __init__(self, site: Site):
        self.site = site
        K = site.base
        self.objects = {K.name(x): x for x in K.objects}
        self.one = {K.name(f): f for f in K.onecells()}

    def obj(self, s: str):
        if s not in self.objects:
            raise UsageError(f"unknown object {s!r}")
        return self.objects[s]

    def onecell(self, s: str):
        if s not in self.one:
            raise UsageError(f"unknown 1-cell {s!r}")
        return self.one[s]

    def fraction(self, cover: str, arrow: str):
        try:
            return make_fraction(self.site, self.onecell(cover), self.onecell(arrow))
        except TwoCatError as exc:
            raise UsageError(f"({cover}, {arrow}) is not a fraction: {exc}") from None

    def fraction_map(self, spec):
        j1, f1, j2, f2, cell = spec
        F, G = self.fraction(j1, f1), self.fraction(j2, f2)
        K = self.site.base
        for t in maps_between(self.site, F, G):
            if K.name(t.cell) == cell:
                return t
        raise UsageError(f"no map {cell!r} from {fraction_name(K, F)} to {fraction_name(K, G)}")


# ---------------------------------------------------------------------------
# commands; each returns (exit code, results, timing)


def cmd_validate(site: Site, args):
    K = site.base
    try:
        rep2 = validate_two_category(K)
    except MalformedTable as exc:
        return EXIT_INVALID, {"two_category": {"ok": False, "malformed": str(exc)}}, {}
    except KeyError as exc:
        return EXIT_INVALID, {"two_category": {"ok": False, "malformed": f"missing entry {exc}"}}, {}
    results = {"two_category": _validation_dict(K, rep2)}
    if rep2.ok:
        results["site"] = _validation_dict(K, validate_site(site))
    ok = all(r["ok"] for r in results.values())
    return (EXIT_OK if ok else EXIT_INVALID), results, {}


def _validation_dict(K, rep) -> dict:
    return {
        "ok": rep.ok,
        "checked": dict(sorted(rep.checked.items())),
        "failed": dict(sorted(rep.failed.items())) or dict(
            sorted((law, sum(1 for v in rep.violations if v.law == law)) for law in rep.laws())
        ),
        "violations": [v.as_dict(K.name) for v in rep.violations],
    }


def cmd_homcat(site: Site, args):
    names = Names(site)
    K = site.base
    x, y = names.obj(args.x), names.obj(args.y)
    H = build_hom_category(site, x, y, strict=args.strict)
    ax = H.axiom_check()
    undefined = H.closure.undefined if H.closure is not None else len(H.undefined)
    results = {
        "x": args.x,
        "y": args.y,
        "fractions": [fraction_name(K, F) for F in enumerate_fractions(site, x, y)],
        "objects": [fraction_name(K, F) for F in H.objects],
        "excluded": [fraction_name(K, F) for F in H.excluded],
        "maps": len(H.arrows),
        "engine": "thin" if H.closure is not None else "generic",
        "composites": len(H.compose),
        "undefined_composites": undefined,
        "axioms": {
            "ok": ax.ok,
            "checked": dict(sorted(ax.checked.items())),
            "derived": dict(sorted(ax.derived.items())),
            "skipped": dict(sorted(ax.skipped.items())),
            "violations": [[str(c) for c in v] for v in ax.violations[:25]],
        },
    }
    if len(H.arrows) <= 64:
        results["map_list"] = [map_name(K, t) for t in H.arrows]
    return (EXIT_OK if ax.ok else EXIT_CHECK_FAILED), results, {}


def cmd_compose(site: Site, args):
    names = Names(site)
    K = site.base
    toks = args.fractions
    if len(toks) < 2 or len(toks) % 2:
        raise UsageError("compose takes cover/arrow pairs: J1 F1 [J2 F2 ...]")
    fracs = [names.fraction(toks[i], toks[i + 1]) for i in range(0, len(toks), 2)]
    out = fracs[0]
    for F in fracs[1:]:
        if out.tgt != F.src:
            raise UsageError(f"{fraction_name(K, out)} and {fraction_name(K, F)} are not composable")
        out = compose_fractions(site, out, F)
    results = {
        "inputs": [fraction_name(K, F) for F in fracs],
        "composite": fraction_name(K, out),
        "source": K.name(out.src),
        "target": K.name(out.tgt),
        "apex": K.name(out.apex),
    }
    return EXIT_OK, results, {}


def cmd_check(site: Site, args, payload):
    suites = list(args.suites or []) + list(args.suite or [])
    if not suites or "all" in suites:
        suites = list(SUITE_NAMES)
    unknown = [s for s in suites if s not in SUITE_NAMES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITE_NAMES)}")
    suites = sorted(set(suites))
    if args.jobs > 1 and len(suites) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_suite_job, payload, name, args.cap_apex, args.seed) for name in suites
            ]
            done = [f.result() for f in futures]
    else:
        done = [run_suite(name, site, apex_cap=args.cap_apex, seed=args.seed) for name in suites]
    # deterministic merge, ordered by suite name
    results = [r.as_dict(timing=False) for r in done]
    timing = {r.suite: round(r.elapsed, 3) for r in done}
    ok = all(r.ok for r in done)
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), results, timing


def _suite_job(payload, name, apex_cap, seed):
    return run_suite(name, _site_from_payload(payload), apex_cap=apex_cap, seed=seed)


def cmd_export_trace(site: Site, args):
    names = Names(site)
    K = site.base
    kind = args.kind
    maps = [names.fraction_map(m) for m in args.map or []]
    frac = names.fraction(*args.fraction) if args.fraction else None
    if kind == "vcomp":
        if len(maps) != 2:
            raise UsageError("vcomp traces need two --map options")
        t, tr = vcompose_with_trace(site, maps[0], maps[1])
        trace = {
            "kind": "vcomp",
            "triple_apex": K.name(tr.triple_apex),
            "along": K.name(tr.along),
            "along_is_cover": tr.along_is_cover,
            "pasted": K.name(tr.oplus),
            "descended": K.name(tr.result),
            "certificates": [],
        }
    else:
        if len(maps) != 1 or frac is None:
            raise UsageError(f"{kind} traces need one --map and one --fraction")
        fn = {
            "right": lambda: right_whisker(site, maps[0], frac, trace=True),
            "left": lambda: left_whisker(site, frac, maps[0], trace=True),
            "left-I": lambda: left_whisker_I(site, frac, maps[0], trace=True),
            "left-II": lambda: left_whisker_II(site, frac, maps[0], trace=True),
        }[kind]
        t, tr = fn()
        trace = {
            "kind": tr.kind,
            "apexes": {k: K.name(v) for k, v in sorted(tr.apexes.items())},
            "certificates": [{"step": d, "holds": bool(h)} for d, h in tr.certificates],
        }
    trace["result"] = map_name(K, t)
    ok = all(c["holds"] for c in trace["certificates"])
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), trace, {}


# ---------------------------------------------------------------------------
# reports


def build_report(command, arguments, site_info, code, results, timing, error=None) -> dict:
    report = {
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_VERSION,
        "command": command,
        "arguments": arguments,
        "site": site_info,
        "ok": code == EXIT_OK,
        "exit_code": code,
        "results": results,
    }
    if error is not None:
        report["error"] = error
    if timing is not None:
        report["timing"] = timing
    return report


def render_machine(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {'OK' if report['ok'] else 'FAILED'} (exit {report['exit_code']})"]
    site = report.get("site")
    if site:
        lines.append(f"site {site['name']} ({site['source']}, sha256 {site['digest'][:16]})")
    err = report.get("error")
    if err:
        where = f" at {err['line']}:{err['column']}" if err.get("line") else ""
        lines.append(f"error [{err['class']}]{where}: {err['message']}")
    results = report.get("results")
    if report["command"] == "check" and isinstance(results, list):
        for r in results:
            n, s, f = (sum(r[k].values()) for k in ("checked", "skipped", "failed"))
            status = "PASS" if r["ok"] else "FAIL"
            lines.append(f"{status} {r['suite']}: {n} checked, {s} skipped, {f} failed")
            for law, count in r["failed"].items():
                lines.append(f"    failed {law}: {count}")
            for w in r["failures"][:5]:
                lines.append(f"    witness {w['law']}: {' | '.join(w['witness'])}")
            for key in ("replayed", "agreement", "noncommutative", "hcomp", "search_site"):
                if key in r["notes"]:
                    lines.append(f"    {key}: {json.dumps(r['notes'][key], sort_keys=True)}")
    elif isinstance(results, dict):
        for key, value in results.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"  {key}: {value}")
    timing = report.get("timing")
    if timing:
        lines.append("timing: " + ", ".join(f"{k} {v:.2f}s" for k, v in sorted(timing.items())))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("site and output")
    g.add_argument("--site", default=argparse.SUPPRESS, help="2-site document to load")
    g.add_argument(
        "--example",
        default=argparse.SUPPRESS,
        help="built-in site: trivial(terminal|monoid), codiscrete(N) or directed(cap)",
    )
    g.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampled checks")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel suite workers")
    g.add_argument("--cap-apex", type=int, default=argparse.SUPPRESS, help="apex size bound")
    g.add_argument("--output", default=argparse.SUPPRESS, help="write the report to a file")
    g.add_argument(
        "--no-timing", action="store_true", default=argparse.SUPPRESS, help="omit timing fields"
    )

    p = argparse.ArgumentParser(
        prog="anafrac",
        parents=[common],
        description="Build and check the bicategory of fractions of a finite 2-site.",
        epilog="exit codes: 0 ok, 1 check failed, 2 usage, 3 parse, 4 invalid site, "
        "5 missing pullback, 6 size cap, 7 other construction error",
    )
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the 2-category and site axioms")
    h = sub.add_parser("homcat", parents=[common], help="build the hom-category between two objects")
    h.add_argument("x")
    h.add_argument("y")
    h.add_argument("--strict", action="store_true", help="fail on the first missing pullback")
    c = sub.add_parser("compose", parents=[common], help="compose fractions given as cover/arrow pairs")
    c.add_argument("fractions", nargs="+", metavar="CELL")
    k = sub.add_parser("check", parents=[common], help="run check suites")
    k.add_argument("suites", nargs="*", metavar="SUITE", help=f"'all' or any of {', '.join(SUITE_NAMES)}")
    k.add_argument("--suite", action="append", help="add a suite (repeatable)")
    e = sub.add_parser("example", parents=[common], help="print a built-in site as a document")
    e.add_argument("name")
    t = sub.add_parser("export-trace", parents=[common], help="export a whiskering or composition trace")
    t.add_argument("kind", choices=("right", "left", "left-I", "left-II", "vcomp"))
    t.add_argument("--map", nargs=5, action="append", metavar=("J1", "F1", "J2", "F2", "CELL"))
    t.add_argument("--fraction", nargs=2, metavar=("J", "F"))
    return p


DEFAULTS = {
    "site": None,
    "example": None,
    "format": "text",
    "seed": 0,
    "jobs": 1,
    "cap_apex": None,
    "output": None,
    "no_timing": False,
}


def parse_args(argv):
    args = build_parser().parse_args(argv)
    for key, value in DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return args


def _arguments(args) -> dict:
    skip = {"site", "example", "format", "output", "no_timing", "jobs", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run_command(argv) -> tuple[int, dict | str]:
    """Run one command; returns the exit code and the report (or document text)."""
    code, report, _ = _execute(argv)
    return code, report


def _execute(argv):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), {}, None
    except UsageError as exc:
        error = {"class": "usage", "message": str(exc)}
        return EXIT_USAGE, build_report(None, {}, None, EXIT_USAGE, None, None, error), None
    if args.command == "example":
        try:
            return EXIT_OK, serialize_site(document_from_site(generate_example(args.name))), args
        except (ValueError, CapExceeded) as exc:
            error = {"class": "usage", "message": str(exc)}
            report = build_report("example", {"name": args.name}, None, EXIT_USAGE, None, None, error)
            return EXIT_USAGE, report, args
    site_info = None
    timing = None if args.no_timing else {}
    try:
        site, site_info, payload = load_site(args)
        if args.command == "validate":
            code, results, t = cmd_validate(site, args)
        elif args.command == "homcat":
            code, results, t = cmd_homcat(site, args)
        elif args.command == "compose":
            code, results, t = cmd_compose(site, args)
        elif args.command == "check":
            code, results, t = cmd_check(site, args, payload)
        else:
            code, results, t = cmd_export_trace(site, args)
        if timing is not None:
            timing.update(t)
        error = None
    except ParseError as exc:
        code, results = EXIT_PARSE, None
        error = {"class": "reference" if hasattr(exc, "identifier") else "parse",
                 "message": exc.message, "line": exc.line, "column": exc.column}
    except UsageError as exc:
        code, results, error = EXIT_USAGE, None, {"class": "usage", "message": str(exc)}
    except MissingPullback as exc:
        code, results, error = EXIT_MISSING_PULLBACK, None, {"class": "missing-pullback", "message": str(exc)}
    except CapExceeded as exc:
        code, results, error = EXIT_CAP, None, {"class": "cap-exceeded", "message": str(exc)}
    except MalformedTable as exc:
        code, results, error = EXIT_INVALID, None, {"class": "invalid", "message": str(exc)}
    except TwoCatError as exc:
        code, results, error = EXIT_CONSTRUCTION, None, {
            "class": type(exc).__name__, "message": str(exc)}
    report = build_report(args.command, _arguments(args), site_info, code, results, timing, error)
    return code, report, args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report, args = _execute(argv)
    if not report:
        return code
    if isinstance(report, str):
        text = report
    elif args is not None and args.format == "machine":
        text = render_machine(report)
    else:
        text = render_text(report)
    if args is not None and args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        (sys.stdout if args is not None else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
