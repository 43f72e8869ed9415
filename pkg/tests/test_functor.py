"""The functor DSL: polarities, object/map/relation/ep actions, laws."""

from __future__ import annotations

from math import comb

import pytest

from relfix.errors import InadmissibleRelation, LawViolation, TypeMismatch
from relfix.functor import (
    Const,
    Fun,
    Lift,
    One,
    Prod,
    SumSep,
    Var,
    check_functor_laws,
    eval_ep,
    eval_map,
    eval_obj,
    eval_rel,
    hom_map,
    is_covariant,
    to_src,
    validate_functor,
    var_polarities,
)
from relfix.poset import chain_poset, identity_map, one
from relfix.relations import bottom_rel, diagonal, rel_from_pairs, total_rel

C2 = chain_poset(2)

LAZY = SumSep(One(), Var())
STREAM = Lift(Prod(Const(C2, diagonal(C2)), Var()))
REFLEX = Lift(Fun(Var(), Var()))


def test_polarities():
    assert var_polarities(LAZY) == frozenset({1})
    assert var_polarities(REFLEX) == frozenset({1, -1})
    assert var_polarities(Fun(Var(), One())) == frozenset({-1})
    assert is_covariant(LAZY) and is_covariant(STREAM)
    assert not is_covariant(REFLEX)


def test_to_src_round_trips_through_the_grammar():
    assert to_src(LAZY) == "sum(one, D)"
    assert to_src(REFLEX) == "lift(fun(D, D))"
    assert "const(" in to_src(STREAM)


def test_validate_functor_rejects_inadmissible_const():
    bad = Const(C2, rel_from_pairs(C2, [(1, 1)]))
    with pytest.raises(InadmissibleRelation):
        validate_functor(Lift(bad))


def test_validate_functor_rejects_carrier_mismatch():
    bad = Const(C2, diagonal(chain_poset(3)))
    with pytest.raises(TypeMismatch):
        validate_functor(bad)


def test_eval_obj_sizes_follow_the_constructions():
    # |sum(one, X)| = |X| + 2, |lift(2 x X)| = 2|X| + 1,
    # |lift(X -> X)| = (number of monotone endomaps) + 1.
    for k in (1, 2, 5):
        x = chain_poset(k)
        assert eval_obj(LAZY, x, x).n == k + 2
        assert eval_obj(STREAM, x, x).n == 2 * k + 1
        assert eval_obj(REFLEX, x, x).n == comb(2 * k - 1, k) + 1


def test_eval_obj_mixed_variance_uses_both_arguments():
    c3 = chain_poset(3)
    h = eval_obj(Fun(Var(), Var()), C2, c3)  # maps from the neg slot
    assert h.n == comb(2 + 3 - 1, 2)


def test_eval_map_identity_and_known_collapse():
    from relfix.poset import const_map

    x = chain_poset(3)
    assert eval_map(LAZY, identity_map(x), identity_map(x)).is_identity()
    # sum(one, -) applied to the constant-bottom endomap: the right
    # summand collapses onto its injected bottom, the rest stays fixed.
    collapsed = eval_map(LAZY, None, const_map(x, x, x.bottom))
    assert collapsed.table == (0, 1, 2, 2, 2)


def test_eval_rel_on_the_sum_functor():
    x = chain_poset(2)
    fx = eval_obj(LAZY, x, x)
    # the summed relation of total inputs keeps the summands apart
    out_total = eval_rel(LAZY, total_rel(x), total_rel(x))
    assert out_total.carrier == fx
    assert (fx.bottom, fx.bottom) in out_total
    assert len(out_total) < fx.n * fx.n
    # 1 bottom pair + 1x1 left block + 2x2 right block
    assert len(out_total) == 1 + 1 + 4


def test_eval_rel_of_diagonals_is_the_diagonal():
    x = chain_poset(2)
    for f in (LAZY, STREAM, REFLEX):
        fx = eval_obj(f, x, x)
        assert eval_rel(f, diagonal(x), diagonal(x)) == diagonal(fx)


def test_eval_rel_rejects_inadmissible_inputs():
    with pytest.raises(InadmissibleRelation):
        eval_rel(LAZY, rel_from_pairs(C2, [(1, 1)]), rel_from_pairs(C2, [(1, 1)]))


def test_eval_ep_produces_valid_pairs():
    from relfix.ep import bottom_ep

    step = bottom_ep(one(), eval_obj(LAZY, one(), one()))
    for f in (LAZY, STREAM, REFLEX):
        base = bottom_ep(one(), eval_obj(f, one(), one()))
        lifted = eval_ep(f, base)
        assert (lifted.p @ lifted.e).is_identity()
        assert (lifted.e @ lifted.p).pointwise_leq(identity_map(lifted.cod))


def test_functor_laws_hold_for_the_canonical_three():
    for f in (LAZY, STREAM, REFLEX):
        report = check_functor_laws(f, budget=2000)
        assert set(report["laws"]) == {
            "identity",
            "composition",
            "monotonicity",
            "relational",
        }
        for law in report["laws"].values():
            assert law["instances"] > 0


def test_broken_composition_action_is_caught():
    def swapped(f, neg, pos, caps=None):
        # flip the two halves of the hom action on endo-typed instances:
        # identities still map to identities, but composition breaks
        endo = neg.dom == neg.cod and pos.dom == pos.cod and neg.dom == pos.dom
        if isinstance(f, Fun) and endo:
            return hom_map(pos, neg) if caps is None else hom_map(pos, neg, caps)
        return eval_map(f, neg, pos) if caps is None else eval_map(f, neg, pos, caps)

    with pytest.raises(LawViolation) as err:
        check_functor_laws(Fun(Var(), Var()), budget=5000, action=swapped)
    assert err.value.details["law"] in ("composition", "relational")
