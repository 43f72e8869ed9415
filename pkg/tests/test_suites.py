"""The named invariant suites and their dispatch."""

from __future__ import annotations

import pytest

from relfix.suites import (
    all_suites,
    canonical_specs,
    corrupted_action_suite,
    duality_suite,
    functor_laws_suite,
    run_suite,
    small_pointed_posets,
)


def test_small_poset_corpus_is_every_pointed_poset_up_to_three_elements():
    corpus = small_pointed_posets()
    assert [p.n for p in corpus] == [1, 2, 3, 3]
    # the two 3-element pointed posets: the chain and the vee
    chains = [p for p in corpus if p.n == 3 and p.le(1, 2)]
    vees = [p for p in corpus if p.n == 3 and not p.le(1, 2) and not p.le(2, 1)]
    assert len(chains) == 1 and len(vees) == 1


def test_canonical_specs_cover_the_three_equations():
    specs = canonical_specs()
    assert set(specs) == {"lazy_nat", "streams", "reflexive"}
    assert specs["lazy_nat"][1] == 6
    assert specs["streams"][1] == 4
    assert specs["reflexive"][1] == 3


def test_duality_suite():
    report = duality_suite()
    assert report["ok"] is True
    assert report["specs"]["lazy_nat"]["glued_pairs"] == 13
    assert report["specs"]["streams"]["glued_pairs"] == 31
    assert report["specs"]["reflexive"]["glued_pairs"] == 36


def test_functor_laws_suite():
    report = functor_laws_suite()
    assert report["ok"] is True
    assert set(report["functors"]) == {"lazy_nat", "streams", "reflexive"}


def test_corrupted_fixture_is_always_a_failure_with_a_witness():
    report = corrupted_action_suite()
    assert report["ok"] is False
    assert report["caught"] is True
    assert report["law"] in ("composition", "relational")
    assert report["witness"]


def test_run_suite_dispatch():
    assert set(all_suites()) == {
        "lemma2",
        "adjunction",
        "functor_laws",
        "contractive",
        "karoubi",
        "duality",
    }
    combined = run_suite("all")
    assert combined["ok"] is True
    assert set(combined["suites"]) == set(all_suites())
    assert run_suite("corrupted")["ok"] is False
    with pytest.raises(KeyError):
        run_suite("nope")
