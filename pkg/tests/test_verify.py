import pytest

from nilquat.chain_ring import ring_from_string
from nilquat.verify import SUITE_NAMES, run_suites


def test_all_suites_pass_on_gf3():
    results = run_suites(ring_from_string("polyq:3^1^1"), ("all",),
                         samples=5000)
    assert [r.suite for r in results] == list(SUITE_NAMES)
    for r in results:
        assert r.passed, (r.suite, r.violations, r.note)


def test_selected_suites_on_z9():
    ring = ring_from_string("zmod:3^2")
    results = run_suites(ring, ("axioms", "lemma33", "lemma34", "thm38"),
                         samples=5000)
    assert all(r.passed for r in results)
    assert results[0].ring == "zmod:3^2"


def test_vacuous_suites_report_notes():
    ring = ring_from_string("zmod:3^2")
    scan, pairs, example = run_suites(
        ring, ("lemma37", "lemma311", "example39"), samples=100)
    assert scan.checks == 0 and "unsatisfiable" in scan.note
    assert pairs.checks == 0 and "field" in pairs.note
    assert example.passed  # applicable here: n = 2 and n - 1 = 1 is a unit
    assert example.checks == 3

    gf3 = ring_from_string("polyq:3^1^1")
    example_field = run_suites(gf3, ("example39",))[0]
    assert example_field.checks == 0
    assert "inapplicable" in example_field.note


def test_unknown_suite_rejected():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suites(ring_from_string("polyq:3^1^1"), ("nonsense",))


def test_suite_result_to_dict():
    r = run_suites(ring_from_string("polyq:3^1^1"), ("lemma311",))[0]
    d = r.to_dict()
    assert d["suite"] == "lemma311"
    assert d["passed"] is True
    assert set(d) == {"suite", "ring", "checks", "violations", "passed",
                      "note"}


def test_seeded_runs_are_reproducible():
    ring = ring_from_string("zmod:3^2")
    a = run_suites(ring, ("lemma36",), samples=2000, seed=5)[0]
    b = run_suites(ring, ("lemma36",), samples=2000, seed=5)[0]
    assert (a.checks, a.violations, a.note) == (b.checks, b.violations,
                                                b.note)
