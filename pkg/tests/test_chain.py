"""Chain construction, truncation projections, families, and gluing."""

from __future__ import annotations

from math import comb

import pytest

from relfix.chain import (
    bottom_family,
    build_chain,
    diagonal_family,
    family_from_limit,
    glue_family,
    is_coherent,
    is_uniform_family,
    make_family,
    total_family,
    truncation_projections,
)
from relfix.engines import solve_kleene
from relfix.errors import (
    DualMismatch,
    InadmissibleRelation,
    SizeCapExceeded,
    TypeMismatch,
)
from relfix.functor import eval_map
from relfix.relations import diagonal, rel_from_pairs, total_rel
from relfix.suites import canonical_specs


def test_level_sizes_solve_the_recurrences():
    chains = {
        name: build_chain(f, depth) for name, (f, depth) in canonical_specs().items()
    }
    sizes = {name: [p.n for p in ch.levels] for name, ch in chains.items()}

    # independent recurrences: |X_{k+1}| = |X_k| + 2 for sum(one, D);
    # 2|X_k| + 1 for lift(2 x D); (monotone endomaps of X_k) + 1 for
    # lift(D -> D), where an n-chain has C(2n-1, n) monotone endomaps.
    assert sizes["lazy_nat"] == [1, 3, 5, 7, 9, 11, 13]
    assert sizes["streams"] == [1, 3, 7, 15, 31]
    assert sizes["reflexive"] == [1, 2, 4, 36]
    for name, ch in chains.items():
        for k in range(ch.depth):
            a = sizes[name][k]
            if name == "lazy_nat":
                assert sizes[name][k + 1] == a + 2
            elif name == "streams":
                assert sizes[name][k + 1] == 2 * a + 1
    # every reflexive level is a chain, so the endomap count is binomial
    assert sizes["reflexive"][2] == comb(2 * 2 - 1, 2) + 1
    assert sizes["reflexive"][3] == 35 + 1  # C(7, 4) endomaps of a 4-chain


def test_negative_depth_is_rejected():
    f, _ = canonical_specs()["lazy_nat"]
    with pytest.raises(TypeMismatch):
        build_chain(f, -1)


def test_size_cap_reports_the_failing_level():
    f, _ = canonical_specs()["reflexive"]
    with pytest.raises(SizeCapExceeded) as err:
        build_chain(f, 4)
    assert err.value.details["level"] == 4


def test_truncation_projection_tables_at_small_depth(lazy_chain):
    f, _ = canonical_specs()["lazy_nat"]
    ch = build_chain(f, 2)
    pis, report = truncation_projections(ch)
    assert [pi.table for pi in pis] == [
        (0, 0, 0, 0, 0),
        (0, 1, 2, 2, 2),
        (0, 1, 2, 3, 4),
    ]
    assert all(report["checks"].values())


def test_pi_invariants(chains):
    for ch in chains.values():
        pis = ch.pis
        n = ch.depth
        assert pis[0].table == tuple(ch.top.bottom for _ in range(ch.top.n))
        assert pis[n].is_identity()
        for j in range(n + 1):
            assert (pis[j] @ pis[j]) == pis[j]
            if j < n:
                assert pis[j].pointwise_leq(pis[j + 1])


def test_pi_recurrence_under_level_identification(chains):
    # pi_{j+1} on X_{m+1} is the functor's action on pi_j on X_m
    for ch in chains.values():
        f = ch.functor
        for m in range(ch.depth):
            for j in range(m + 1):
                lhs = ch.level_pi(j + 1, m + 1)
                inner = ch.level_pi(j, m)
                assert lhs == eval_map(f, inner, inner, ch.caps)


def test_ep_pairs_compose_along_the_chain(lazy_chain):
    ch = lazy_chain
    for j in range(ch.depth + 1):
        pair = ch.cum(j)
        assert (pair.p @ pair.e).is_identity()
        assert pair.e.dom == ch.levels[j]
        assert pair.e.cod == ch.top
    # ep(j, n) composes the single steps between j and n
    step_then_step = ch.ep(0, 2)
    assert step_then_step.e == ch.steps[1].e @ ch.steps[0].e
    assert step_then_step.p == ch.steps[0].p @ ch.steps[1].p


def test_make_family_validation(lazy_chain):
    ch = lazy_chain
    levels = ch.levels
    with pytest.raises(TypeMismatch):
        make_family(ch, [diagonal(levels[0])] * (ch.depth + 1))
    rels = [diagonal(p) for p in levels]
    rels[1] = rel_from_pairs(levels[1], [(1, 1)])
    with pytest.raises(InadmissibleRelation):
        make_family(ch, rels)


def test_standard_families(lazy_chain):
    ch = lazy_chain
    assert all(len(r) == p.n * p.n for r, p in zip(total_family(ch), ch.levels))
    assert all(len(r) == 1 for r in bottom_family(ch))
    diag = diagonal_family(ch)
    assert is_uniform_family(diag)
    assert is_coherent(diag)


def test_incoherent_family_fails_to_glue():
    f, _ = canonical_specs()["lazy_nat"]
    ch = build_chain(f, 2)
    x0, x1, x2 = ch.levels
    fam = make_family(ch, [diagonal(x0), total_rel(x1), diagonal(x2)])
    assert not is_coherent(fam)
    assert not is_uniform_family(fam)
    with pytest.raises(DualMismatch) as err:
        glue_family(ch, fam)
    assert err.value.details["only_direct"]  # embedded pairs the limit lost


def test_glue_and_family_from_limit_round_trip(chains):
    for ch in chains.values():
        fam = solve_kleene(ch)
        glued = glue_family(ch, fam)
        back = family_from_limit(ch, glued)
        assert all(back[m] == fam[m] for m in range(ch.depth + 1))
