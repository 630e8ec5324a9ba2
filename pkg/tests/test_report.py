from anafrac.report import WITNESS_LIMIT, SuiteResult


def test_counts_and_witness_limit():
    res = SuiteResult("s", "site")
    assert res.check("a", True)
    for i in range(WITNESS_LIMIT + 5):
        res.check("b", False, i)
    res.skip("c", 3)
    assert not res.ok
    assert res.failed["b"] == WITNESS_LIMIT + 5
    assert len(res.failures) == WITNESS_LIMIT
    assert res.summary() == f"FAIL s on site: 1 checked, 3 skipped, {WITNESS_LIMIT + 5} failed"


def test_merge_prefixes_laws():
    a, b = SuiteResult("a", "x"), SuiteResult("b", "x")
    b.check("law", True)
    b.fail("bad", "w")
    a.merge(b, "sub:")
    assert a.checked == {"sub:law": 1} and a.failed == {"sub:bad": 1}
    assert a.failures == [("sub:bad", ["w"])]


def test_as_dict_is_sorted_and_timing_is_optional():
    res = SuiteResult("s", "site")
    res.check("z", True)
    res.check("a", True)
    d = res.as_dict()
    assert list(d["checked"]) == ["a", "z"] and "elapsed_seconds" in d
    assert "elapsed_seconds" not in res.as_dict(timing=False)
    assert d["ok"] is True
