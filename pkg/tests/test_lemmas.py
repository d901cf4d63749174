import random

import pytest

from cohult.acceptance import MUTANTS
from cohult.filters import lemmas

SMALL = [(k, lam, ar) for k in (1, 2) for lam in (1, 2) for ar in (1, 2)]


@pytest.mark.parametrize("k,lam,ar", SMALL)
def test_nicefull_duud_extfip_hold(k, lam, ar):
    for suite in (lemmas.nicefull_suite, lemmas.duud_suite, lemmas.extfip_suite):
        r = suite(k, lam, ar)
        assert r.passed, r.certificates[:1]
        assert r.instances > 0


@pytest.mark.slow
@pytest.mark.parametrize("k,lam", [(1, 3), (2, 3)])
def test_nicefull_up_to_three_indices(k, lam):
    r = lemmas.nicefull_suite(k, lam, 3)
    assert r.passed and r.instances > 0


@pytest.mark.parametrize("k,lam,ar", SMALL)
def test_extension_used_by_completion_is_coherent(k, lam, ar):
    assert lemmas.coherent_extend_suite(k, lam, ar).passed


def test_literal_onestep_counterexamples_are_exactly_at_the_pair_cube():
    bad = {t: len(lemmas.onestep_suite(*t).certificates) for t in SMALL}
    assert bad[(2, 2, 2)] == 16
    assert sum(bad.values()) == 16
    cert = lemmas.onestep_suite(2, 2, 2).certificates[0]
    assert cert["problems"] == ["incoherent"]


def test_nicefull_reference_path_matches_kernel():
    fast = lemmas.nicefull_suite(2, 2, 2)
    slow = lemmas.nicefull_suite(2, 2, 2, fullify_fn=lemmas.fullify)
    assert fast.instances == slow.instances and fast.passed and slow.passed


def test_mutant_fullification_is_caught():
    r = lemmas.nicefull_suite(2, 2, 2, fullify_fn=MUTANTS["fullify-identity"])
    assert not r.passed
    cert = r.certificates[0]
    assert cert["clause"] in (1, 2)


@pytest.mark.parametrize("k,lam,ar", SMALL)
def test_completion(k, lam, ar):
    assert lemmas.completion_suite(k, lam, ar).passed


@pytest.mark.parametrize("k,expected", [(1, 1), (2, 4), (3, 9)])
def test_ultrafilters_correspond_to_functions(k, expected):
    r = lemmas.enumeration_suite(k, 2, 2)
    assert r.passed and r.details["ultrafilters"] == expected


@pytest.mark.parametrize("k,lam", [(2, 2), (3, 2), (2, 3)])
def test_products_match_section_oracle(k, lam):
    assert lemmas.product_suite(k, lam, lam, rng=random.Random(1)).passed


def test_tensor_oracle_direct():
    assert lemmas.tensor_oracle([1, 0], {(1, 0), (0, 0)})
    assert not lemmas.tensor_oracle([1, 0], {(1, 1)})
    assert lemmas.tensor_oracle([], {()})


@pytest.mark.parametrize("k,lam,ar", SMALL)
def test_projection_and_fullification_suites(k, lam, ar):
    assert lemmas.functoriality_suite(k, lam, ar).passed
    assert lemmas.fullification_suite(k, lam, ar).passed


def test_suite_result_serializes():
    d = lemmas.duud_suite(2, 2, 2).as_dict()
    assert d["passed"] and d["counterexamples"] == 0 and d["instances"] > 0
