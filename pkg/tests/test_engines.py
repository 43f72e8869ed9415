"""The three fixed-point engines and their agreement."""

from __future__ import annotations

import pytest

from relfix.chain import (
    bottom_family,
    build_chain,
    diagonal_family,
    glue_family,
    total_family,
)
from relfix.engines import (
    check_uniform,
    compare_methods,
    psi_step,
    solve_banach,
    solve_kleene,
    solve_knaster_tarski,
)
from relfix.functor import Const, Lift, Prod, Var
from relfix.poset import chain_poset
from relfix.relations import total_rel
from relfix.suites import canonical_specs


def test_diagonal_family_is_the_psi_fixed_point(chains):
    # For all three canonical functors the relational action sends
    # diagonals to diagonals, so the diagonal family solves R = Psi(R).
    for ch in chains.values():
        diag = diagonal_family(ch)
        out = psi_step(ch, diag)
        assert all(out[m] == diag[m] for m in range(ch.depth + 1))


def test_knaster_tarski_closes_the_pair(solved):
    for name, report in solved.items():
        assert report["agreement"] is True
        assert report["fixed_point_equation"] is True


def test_kt_iteration_count_is_depth_plus_one(chains):
    # each sweep of the pair operator settles one more level, so the
    # iteration count is exactly depth + 1 on the canonical specs
    for ch in chains.values():
        pair, iterations = solve_knaster_tarski(ch)
        assert iterations == ch.depth + 1
        assert all(pair.neg[m] == pair.pos[m] for m in range(ch.depth + 1))


def test_methods_agree_levelwise(chains):
    for ch in chains.values():
        pair, _ = solve_knaster_tarski(ch)
        kleene = solve_kleene(ch)
        banach, _ = solve_banach(ch)
        for m in range(ch.depth + 1):
            assert pair.pos[m] == kleene[m] == banach[m]


def test_banach_stabilization_profile(chains):
    for ch in chains.values():
        _, profile = solve_banach(ch)
        assert profile == list(range(ch.depth + 1))


def test_banach_converges_from_distinct_starts(chains):
    for ch in chains.values():
        from_top, _ = solve_banach(ch)
        from_bottom, _ = solve_banach(ch, start=bottom_family(ch))
        assert all(
            from_top[m] == from_bottom[m] for m in range(ch.depth + 1)
        )


def test_check_uniform(chains, solved):
    for name, ch in chains.items():
        fam = solve_kleene(ch)
        ok, witness = check_uniform(ch, glue_family(ch, fam))
        assert ok and witness is None
    # relating only the two top elements is not uniform: pi_{N-1} moves
    # that pair strictly down, outside the relation
    ch = chains["lazy_nat"]
    top = ch.top
    from relfix.relations import rel_from_pairs

    bad = rel_from_pairs(top, [(0, 0), (top.n - 1, top.n - 1)])
    ok, witness = check_uniform(ch, bad)
    assert not ok
    assert witness is not None


def test_nondiagonal_const_relation_changes_the_solution():
    # streams over the *total* head relation: each level relates
    # everything of equal shape, sizes follow c_{k+1} = 4 c_k + 1
    c2 = chain_poset(2)
    f = Lift(Prod(Const(c2, total_rel(c2)), Var()))
    ch = build_chain(f, 4)
    report = compare_methods(ch)
    assert report["agreement"] and report["uniform"]
    counts = [len(r) for r in report["_family"].rels]
    expect = [1]
    for _ in range(4):
        expect.append(4 * expect[-1] + 1)
    assert counts == expect == [1, 5, 21, 85, 341]


def test_compare_methods_report_shape(solved):
    for report in solved.values():
        for key in (
            "functor",
            "depth",
            "sizes",
            "kt_iterations",
            "banach_profile",
            "agreement",
            "fixed_point_equation",
            "uniform",
            "uniform_witness",
            "family",
            "glued",
        ):
            assert key in report
        assert report["uniform_witness"] is None
