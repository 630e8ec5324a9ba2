import json

import pytest

from anafrac import cli
from anafrac.cli import (
    EXIT_CHECK_FAILED,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    main,
    render_machine,
    run_command,
)
from anafrac.document import parse_site


@pytest.fixture
def c2_file(tmp_path):
    code, text = run_command(["example", "codiscrete(2)"])
    assert code == EXIT_OK
    path = tmp_path / "c2.site"
    path.write_text(text)
    return str(path)


def test_example_prints_a_parseable_document():
    code, text = run_command(["example", "directed(4)"])
    assert code == EXIT_OK
    assert parse_site(text).name == "directed(4)"


def test_validate_generated_codiscrete4():
    code, report = run_command(["--example", "codiscrete(4)", "validate"])
    assert code == EXIT_OK
    assert report["results"]["two_category"]["ok"] and report["results"]["site"]["ok"]


def test_validate_document(c2_file):
    code, report = run_command(["--site", c2_file, "validate"])
    assert code == EXIT_OK
    assert report["site"]["source"] == "document"
    assert len(report["site"]["digest"]) == 64


def test_homcat_codiscrete2_e1_e1():
    code, report = run_command(["--example", "codiscrete(2)", "homcat", "E1", "E1"])
    assert code == EXIT_OK
    res = report["results"]
    assert len(res["fractions"]) == 2
    # the second fraction has apex E2, whose self-pullback E4 exceeds the size bound
    assert len(res["objects"]) == 1 and len(res["excluded"]) == 1
    assert res["maps"] == 1
    assert res["axioms"]["ok"]


def test_homcat_strict_reports_missing_pullback():
    code, report = run_command(["--example", "codiscrete(2)", "homcat", "E1", "E1", "--strict"])
    assert code == cli.EXIT_MISSING_PULLBACK
    assert report["error"]["class"] == "missing-pullback"


def test_compose():
    code, report = run_command(
        ["--example", "codiscrete(2)", "compose", "E2->E1[]", "E2->E2[e0]", "E2->E2[e0]", "E2->E1[]"]
    )
    assert code == EXIT_OK, report
    assert report["results"]["source"] == "E1" and report["results"]["target"] == "E1"


def test_compose_rejects_non_covers():
    code, report = run_command(["--example", "codiscrete(2)", "compose", "E1->E2[0]", "E1->E2[0]"])
    assert code == EXIT_USAGE
    assert "not a cover" in report["error"]["message"]


def test_check_appendix_on_codiscrete8_lists_both_chains():
    code, report = run_command(["--example", "codiscrete(8)", "check", "appendix", "--no-timing"])
    assert code == EXIT_OK
    (res,) = report["results"]
    replayed = res["notes"]["replayed"]
    assert replayed["left-whisker-I"] > 0 and replayed["left-whisker-II"] > 0
    assert "timing" not in report


def test_check_all_on_terminal_site_passes_instantly():
    code, report = run_command(["--example", "trivial(terminal)", "check", "all"])
    assert code == EXIT_OK
    assert [r["suite"] for r in report["results"]] == sorted(cli.SUITE_NAMES)


def test_suite_flag_and_unknown_suite():
    code, report = run_command(["--example", "trivial(terminal)", "check", "--suite", "ef", "--suite", "aj"])
    assert code == EXIT_OK
    assert [r["suite"] for r in report["results"]] == ["aj", "ef"]
    code, report = run_command(["--example", "trivial(terminal)", "check", "bogus"])
    assert code == EXIT_USAGE


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.site"
    bad.write_text("anafrac-site 1\n[comp1]\nf g h\n")
    code, report = run_command(["--site", str(bad), "validate"])
    assert code == EXIT_PARSE
    assert report["error"]["class"] == "reference"
    assert (report["error"]["line"], report["error"]["column"]) == (3, 1)


def test_invalid_utf8_is_a_parse_error(tmp_path):
    bad = tmp_path / "bad.site"
    bad.write_bytes(b"anafrac-site 1\n[objects]\n\xff\n")
    code, report = run_command(["--site", str(bad), "validate"])
    assert code == EXIT_PARSE
    assert report["error"]["line"] == 3


def test_validation_failure_exit_code(tmp_path, c2_file):
    text = open(c2_file).read()
    # point one composite at a wrongly typed 1-cell
    lines = text.splitlines()
    i = lines.index("[comp1]") + 1
    f, g, _ = lines[i].split()
    lines[i] = f"{f} {g} E1->E2[0]"
    bad = tmp_path / "bad.site"
    bad.write_text("\n".join(lines) + "\n")
    code, report = run_command(["--site", str(bad), "validate"])
    assert code == EXIT_INVALID
    assert not report["results"]["two_category"]["ok"]


def test_missing_table_entry_is_invalid(tmp_path, c2_file):
    lines = open(c2_file).read().splitlines()
    i = lines.index("[vcomp]") + 1
    del lines[i]
    bad = tmp_path / "bad.site"
    bad.write_text("\n".join(lines) + "\n")
    code, _ = run_command(["--site", str(bad), "validate"])
    assert code == EXIT_INVALID


def test_export_trace_right_and_vcomp():
    base = ["--example", "codiscrete(2)", "export-trace"]
    m = ["--map", "E1->E1[]", "E1->E2[0]", "E1->E1[]", "E1->E2[1]", "E1->E2[0]=>E1->E2[1]"]
    code, report = run_command(base + ["right", *m, "--fraction", "E2->E2[e0]", "E2->E1[]"])
    assert code == EXIT_OK, report
    assert report["results"]["kind"] == "right"
    assert all(c["holds"] for c in report["results"]["certificates"])
    m2 = ["--map", "E1->E1[]", "E1->E2[1]", "E1->E1[]", "E1->E2[0]", "E1->E2[1]=>E1->E2[0]"]
    code, report = run_command(base + ["vcomp", *m, *m2])
    assert code == EXIT_OK, report
    assert report["results"]["descended"] == "E1->E2[0]=>E1->E2[0]"


def test_export_trace_needs_inputs():
    code, _ = run_command(["--example", "codiscrete(2)", "export-trace", "right"])
    assert code == EXIT_USAGE


def test_unknown_identifier_and_example():
    assert run_command(["--example", "codiscrete(2)", "homcat", "E1", "E9"])[0] == EXIT_USAGE
    assert run_command(["--example", "nope(1)", "validate"])[0] == EXIT_USAGE
    assert run_command(["--example", "codiscrete(2)", "--site", "x", "validate"])[0] == EXIT_USAGE
    assert run_command(["frobnicate"])[0] == EXIT_USAGE


def test_machine_report_is_sorted_json():
    code, report = run_command(["--example", "trivial(monoid)", "check", "ef", "--no-timing"])
    text = render_machine(report)
    assert json.loads(text) == report
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    assert report["schema"] == "anafrac-report" and report["schema_version"] == 1


def test_main_writes_text_and_machine(capsys, tmp_path):
    assert main(["--example", "trivial(terminal)", "check", "ef"]) == EXIT_OK
    assert "PASS ef" in capsys.readouterr().out
    out = tmp_path / "r.json"
    assert main(["--example", "trivial(terminal)", "validate", "--format", "machine", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "validate"


def test_jobs_merge_is_deterministic():
    args = ["--example", "trivial(monoid)", "check", "all", "--no-timing", "--format", "machine"]
    serial = run_command(args)[1]
    parallel = run_command(args + ["--jobs", "3"])[1]
    assert serial["results"] == parallel["results"]


def test_failed_check_exit_code(monkeypatch):
    from anafrac.report import SuiteResult

    def broken(name, site, **kw):
        res = SuiteResult(name, site.name)
        res.fail("law", "witness")
        return res

    monkeypatch.setattr(cli, "run_suite", broken)
    code, report = run_command(["--example", "trivial(terminal)", "check", "ef"])
    assert code == EXIT_CHECK_FAILED
    assert report["results"][0]["failures"] == [{"law": "law", "witness": ["witness"]}]
