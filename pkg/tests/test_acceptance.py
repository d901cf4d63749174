"""One test per acceptance criterion; each prints a ``criterion N: PASS/FAIL`` line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines.
"""

import time

import pytest

from cohult import acceptance

REPORTS: dict = {}


def _run(key, limit=None):
    t0 = time.perf_counter()
    rep = acceptance.CRITERIA[key]()
    elapsed = time.perf_counter() - t0
    REPORTS[key] = rep
    ok = rep["passed"] and (limit is None or elapsed < limit)
    print(f"\ncriterion {key}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s)")
    return rep, elapsed


@pytest.mark.slow
@pytest.mark.xfail(
    strict=True,
    reason="the literal one-step extension is not coherent: 16 of 146 outputs at |A|=2, lam=2, arity=2",
)
def test_criterion_1_lemma_suites():
    rep, elapsed = _run("1", 60)
    assert elapsed < 60
    # everything except the one-step clause holds, and the repaired extension is coherent
    suites = rep["suites"]
    assert all(suites[n]["passed"] for n in ("nicefull", "duud", "extfip"))
    assert rep["supplementary"]["coherent_extend"]["passed"]
    assert suites["onestep"]["passed"], suites["onestep"]["first_certificate"]


def test_criterion_2_finite_realization():
    rep, _ = _run("2")
    assert rep["passed"]
    assert {k: v["ultrafilters"] for k, v in rep["enumeration"].items()} == {"1": 1, "2": 4, "3": 9}


def test_criterion_3_products():
    rep, _ = _run("3")
    assert rep["passed"] and rep["product"]["counterexamples"] == 0


@pytest.mark.slow
def test_criterion_4_finite_los():
    rep, elapsed = _run("4", 120)
    assert rep["structures"] == 234
    assert rep["mismatches"] == 0, rep.get("first_mismatch")
    assert rep["passed"] and elapsed < 120


def test_criterion_5_infinitesimal_scenario():
    rep, elapsed = _run("5", 30)
    assert rep["below_minimum"] == []
    assert rep["properness_all_indices"]
    assert rep["passed"], rep["failures"]
    assert elapsed < 30


def test_criterion_6_fm_oracle():
    rep, _ = _run("6")
    assert rep["systems"] == 100
    assert rep["mismatches"] == 0 and rep["bad_witnesses"] == 0


@pytest.mark.slow
def test_criterion_7_determinism():
    first = {k: REPORTS[k] for k in sorted(REPORTS)}
    if set(first) != set(acceptance.CRITERIA):
        first = None  # run in isolation: compute both passes here
    t0 = time.perf_counter()
    rep = acceptance.criterion_7(first)
    print(f"\ncriterion 7: {'PASS' if rep['passed'] else 'FAIL'} ({time.perf_counter() - t0:.1f} s)")
    assert rep["sha256"][0] == rep["sha256"][1]
    assert rep["passed"]
