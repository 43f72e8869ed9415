"""Property suites behind `relfix check` and the acceptance tests.

Each suite returns a report dict with an "ok" verdict and instance
counts; none of them raises on a property failure (the CLI turns a false
verdict into a nonzero exit).

Scale notes.  The relation-morphism lemma suite quantifies over every
pointed poset with at most three elements up to canonical form (one,
the two chains, and the vee), every monotone map between them, and
every admissible relation.  Two of the four properties quantify over an
extra relation R on the domain; for those the universal over R is
decided exactly by comparing pulled-back relations (R ranges over all
admissible relations, and both candidate bounds are admissible, so
"forall R: R <= A iff R <= B" holds exactly when A = B).  Intersections
quantify over the empty and all two-element families, which generate
all finite intersections.
"""

from __future__ import annotations

import itertools

from .chain import build_chain, glue_family
from .cofe import check_contractive
from .config import Caps, DEFAULT_CAPS
from .engines import solve_kleene
from .errors import LawViolation, RelfixError
from .functor import (
    Const,
    Fun,
    FunctorExpr,
    Lift,
    One,
    Prod,
    SumSep,
    Var,
    check_functor_laws,
    eval_map,
    hom_map,
    to_src,
)
from .karoubi import (
    Idempotent,
    KaroubiObj,
    enumerate_canonical_idempotents,
    ed_cpo_check,
    ed_slice_equivalence,
    hat_functor_mor,
    idem_leq,
    karoubi_bottom_hom,
    karoubi_homs,
    karoubi_rel_fiber,
    split_idempotent,
    splitting_iso,
)
from .poset import (
    FinPoset,
    MonotoneMap,
    chain_poset,
    enumerate_monotone_maps,
    identity_map,
    one,
    validate_poset,
)
from .relations import (
    diagonal,
    direct_image,
    inverse_image,
    is_rel_morphism,
    rel_from_pairs,
)

__all__ = [
    "canonical_specs",
    "CANONICAL_SOURCES",
    "vee",
    "diamond",
    "small_pointed_posets",
    "lemma2_suite",
    "adjunction_suite",
    "functor_laws_suite",
    "corrupted_action_suite",
    "contractive_suite",
    "karoubi_suite",
    "duality_suite",
    "all_suites",
    "run_suite",
]


def vee() -> FinPoset:
    """Three elements: bottom under two incomparable points."""
    return validate_poset(3, [(0, 1), (0, 2)], 0, label="vee")


def diamond() -> FinPoset:
    """Four elements: bottom, two incomparable middles, a top."""
    return validate_poset(4, [(0, 1), (0, 2), (1, 3), (2, 3)], 0, label="diamond")


def small_pointed_posets() -> list:
    """All pointed posets with at most 3 elements, up to canonical form."""
    return [one(), chain_poset(2), chain_poset(3), vee()]


def canonical_specs() -> dict:
    """The three canonical domain equations with their standard depths."""
    ch2 = chain_poset(2)
    return {
        "lazy_nat": (SumSep(One(), Var()), 6),
        "streams": (Lift(Prod(Const(ch2, diagonal(ch2)), Var())), 4),
        "reflexive": (Lift(Fun(Var(), Var())), 3),
    }


CANONICAL_SOURCES = {
    "lazy_nat": "domain D = sum(one, D)\ndepth 6\n",
    "streams": "domain D = lift(prod(const(chain(2), diag), D))\ndepth 4\n",
    "reflexive": "domain D = lift(fun(D, D))\ndepth 3\n",
}


# ---------------------------------------------------------------------------
# bitmask plumbing for exhaustive relation quantifiers
# ---------------------------------------------------------------------------


def _bot_bit(p: FinPoset) -> int:
    return 1 << (p.bottom * p.n + p.bottom)


def _admissible_masks(p: FinPoset) -> list:
    """Every admissible relation on p as a pair bitmask, ascending."""
    n2 = p.n * p.n
    bot = _bot_bit(p)
    rest = [q for q in range(n2) if (1 << q) != bot]
    out = []
    for bits in range(1 << len(rest)):
        m = bot
        for i, q in enumerate(rest):
            if (bits >> i) & 1:
                m |= 1 << q
        out.append(m)
    return sorted(out)


def _pair_image(f: MonotoneMap) -> list:
    """Pair-index table of f acting on pairs componentwise."""
    kx, ky = f.dom.n, f.cod.n
    return [f(q // kx) * ky + f(q % kx) for q in range(kx * kx)]


def _pull_mask(img: list, s: int) -> int:
    out = 0
    for q, j in enumerate(img):
        if (s >> j) & 1:
            out |= 1 << q
    return out


def _push_mask(img: list, r: int, bot_cod: int) -> int:
    out = bot_cod
    q = 0
    while r:
        if r & 1:
            out |= 1 << img[q]
        r >>= 1
        q += 1
    return out


def _all_maps(x: FinPoset, y: FinPoset) -> list:
    return [MonotoneMap(x, y, t) for t in enumerate_monotone_maps(x, y)]


# ---------------------------------------------------------------------------
# the relation-morphism lemma and the image adjunction
# ---------------------------------------------------------------------------


def lemma2_suite(caps: Caps = DEFAULT_CAPS) -> dict:
    """The four morphism properties, exhaustive on the small-poset corpus.

    (1) the identity is a morphism R -> S exactly when R <= S;
    (2) f is a morphism f*S -> S;
    (3) g o f : R -> S exactly when f : R -> g*S (forall-R decided by
        pulled-mask equality, see module docstring);
    (4) f : R -> intersection of a family exactly when f is a morphism
        into every member (empty and binary families).
    """
    posets = small_pointed_posets()
    rels = {p: _admissible_masks(p) for p in posets}
    report: dict = {"corpus": [p.label or str(p.n) for p in posets], "properties": {}}

    count = 0
    ok = True
    for p in posets:
        idm = identity_map(p)
        img_id = _pair_image(idm)
        for s in rels[p]:
            pulled = _pull_mask(img_id, s)
            for r in rels[p]:
                count += 1
                if ((r & ~pulled) == 0) != ((r & ~s) == 0):
                    ok = False
        # spot-check the actual operation on a deterministic stride
        for i, (r, s) in enumerate(itertools.product(rels[p], rels[p])):
            if i % 97 == 0 and is_rel_morphism(
                idm, _mask_rel(p, r), _mask_rel(p, s)
            ) != ((r & ~s) == 0):
                ok = False
    report["properties"]["identity_iff_inclusion"] = {"instances": count, "ok": ok}

    count = 0
    ok = True
    for x, y in itertools.product(posets, repeat=2):
        for f in _all_maps(x, y):
            for s in rels[y]:
                count += 1
                srel = _mask_rel(y, s)
                pulled = inverse_image(f, srel)
                if not is_rel_morphism(f, pulled, srel):
                    ok = False
    report["properties"]["pullback_is_morphism"] = {"instances": count, "ok": ok}

    count = 0
    ok = True
    for x, y, z in itertools.product(posets, repeat=3):
        for f in _all_maps(x, y):
            img_f = _pair_image(f)
            for g in _all_maps(y, z):
                img_g = _pair_image(g)
                img_gf = [img_g[j] for j in img_f]
                for s in rels[z]:
                    count += 1
                    if _pull_mask(img_gf, s) != _pull_mask(img_f, _pull_mask(img_g, s)):
                        ok = False
    report["properties"]["composition_transpose"] = {"instances": count, "ok": ok}

    count = 0
    ok = True
    for x, y in itertools.product(posets, repeat=2):
        total_y = (1 << (y.n * y.n)) - 1
        total_x = (1 << (x.n * x.n)) - 1
        for f in _all_maps(x, y):
            img = _pair_image(f)
            count += 1
            if _pull_mask(img, total_y) != total_x:
                ok = False
            pulls = {s: _pull_mask(img, s) for s in rels[y]}
            for s1 in rels[y]:
                for s2 in rels[y]:
                    if s2 < s1:
                        continue
                    count += 1
                    if _pull_mask(img, s1 & s2) != pulls[s1] & pulls[s2]:
                        ok = False
    report["properties"]["meet_preservation"] = {"instances": count, "ok": ok}

    report["ok"] = all(v["ok"] for v in report["properties"].values())
    return report


def _mask_rel(p: FinPoset, mask: int):
    n = p.n
    return rel_from_pairs(
        p, {(q // n, q % n) for q in range(n * n) if (mask >> q) & 1}
    )


def adjunction_suite(caps: Caps = DEFAULT_CAPS) -> dict:
    """direct_image -| inverse_image, exhaustive on the same corpus."""
    posets = small_pointed_posets()
    rels = {p: _admissible_masks(p) for p in posets}
    count = 0
    ok = True
    witnesses = []
    for x, y in itertools.product(posets, repeat=2):
        bot_y = _bot_bit(y)
        for f in _all_maps(x, y):
            img = _pair_image(f)
            pushes = {r: _push_mask(img, r, bot_y) for r in rels[x]}
            pulls = {s: _pull_mask(img, s) for s in rels[y]}
            for r in rels[x]:
                pr = pushes[r]
                for s in rels[y]:
                    count += 1
                    if ((pr & ~s) == 0) != ((r & ~pulls[s]) == 0):
                        ok = False
                        if len(witnesses) < 3:
                            witnesses.append(
                                {"f": list(f.table), "r": r, "s": s}
                            )
    # interface spot-check against the actual operations
    spot = 0
    for x, y in itertools.product(posets[:3], repeat=2):
        for f in _all_maps(x, y)[:2]:
            for r in rels[x][:4]:
                for s in rels[y][:4]:
                    spot += 1
                    lhs = direct_image(f, _mask_rel(x, r)) <= _mask_rel(y, s)
                    rhs = _mask_rel(x, r) <= inverse_image(f, _mask_rel(y, s))
                    if lhs != rhs:
                        ok = False
    return {
        "instances": count,
        "interface_spot_checks": spot,
        "witnesses": witnesses,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# functor laws and the corrupted-action fixture
# ---------------------------------------------------------------------------


def functor_laws_suite(budget: int = 4000, caps: Caps = DEFAULT_CAPS) -> dict:
    """check_functor_laws over the three canonical functors."""
    out: dict = {"functors": {}, "ok": True}
    for name, (f, _depth) in canonical_specs().items():
        try:
            rep = check_functor_laws(f, budget=budget, caps=caps)
            out["functors"][name] = rep
        except LawViolation as exc:
            out["functors"][name] = {"error": str(exc)}
            out["ok"] = False
    return out


def _broken_action(f: FunctorExpr, fneg, fpos, caps: Caps = DEFAULT_CAPS):
    """A deliberately wrong morphism action: the function-space case
    composes in the wrong order whenever the types let it slip through."""
    if (
        isinstance(f, Fun)
        and fneg is not None
        and fpos is not None
        and fneg.dom == fneg.cod
        and fpos.dom == fpos.cod
    ):
        am = eval_map(f.left, fpos, fneg, caps)
        bm = eval_map(f.right, fneg, fpos, caps)
        if am.dom == am.cod and bm.dom == bm.cod:
            return hom_map(bm, am, caps)
    return eval_map(f, fneg, fpos, caps)


def corrupted_action_suite(budget: int = 4000, caps: Caps = DEFAULT_CAPS) -> dict:
    """The harness must catch the broken action; ok means it was caught,
    and the report carries the law-violation witness."""
    try:
        rep = check_functor_laws(
            Fun(Var(), Var()), budget=budget, action=_broken_action, caps=caps
        )
        return {"caught": False, "report": rep, "ok": False}
    except LawViolation as exc:
        return {
            "caught": True,
            "law": exc.details.get("law"),
            "witness": {k: v for k, v in exc.details.items() if k != "law"},
            "ok": False,
        }


# ---------------------------------------------------------------------------
# contractiveness, duality, karoubi
# ---------------------------------------------------------------------------


def contractive_suite(caps: Caps = DEFAULT_CAPS) -> dict:
    """Exhaustive contractiveness on lazy naturals (depth 3, by sections)
    and the function space (depth 2, full), plus the identity-operator
    fixture that must produce a counterexample."""
    out: dict = {"checks": {}, "ok": True}
    lazy = build_chain(SumSep(One(), Var()), 3, caps)
    out["checks"]["lazy_nat_depth3"] = check_contractive(lazy)
    funsp = build_chain(Lift(Fun(Var(), Var())), 2, caps)
    out["checks"]["fun_space_depth2"] = check_contractive(funsp)
    ident = check_contractive(
        build_chain(SumSep(One(), Var()), 1, caps), op=lambda c, fam: fam
    )
    out["checks"]["identity_op_fixture"] = ident
    out["ok"] = (
        out["checks"]["lazy_nat_depth3"]["ok"]
        and out["checks"]["fun_space_depth2"]["ok"]
        and not ident["ok"]
    )
    return out


def duality_suite(caps: Caps = DEFAULT_CAPS) -> dict:
    """Gluing duality for the solved family of each canonical spec; the
    gluing operation itself verifies the intersection-of-pullbacks equals
    the union-of-pushforwards and raises on mismatch."""
    out: dict = {"specs": {}, "ok": True}
    for name, (f, depth) in canonical_specs().items():
        try:
            chain = build_chain(f, depth, caps)
            fam = solve_kleene(chain)
            glued = glue_family(chain, fam)
            out["specs"][name] = {
                "sizes": [p.n for p in chain.levels],
                "glued_pairs": len(glued),
                "ok": True,
            }
        except RelfixError as exc:
            out["specs"][name] = {"error": str(exc), "ok": False}
            out["ok"] = False
    return out


def _all_idempotents(p: FinPoset) -> list:
    """Every idempotent endomap (not only those below the identity)."""
    out = []
    for t in enumerate_monotone_maps(p, p):
        if all(t[v] == t[t[v]] for v in range(p.n)):
            out.append(Idempotent(p, MonotoneMap(p, p, t)))
    return out


def karoubi_suite(caps: Caps = DEFAULT_CAPS) -> dict:
    """The appendix checks at acceptance scale.

    E_CH3 has exactly four members; both idempotent-order conditions
    agree pairwise on every corpus poset up to five elements (idem_leq
    raises on disagreement); splittings satisfy their laws with unique
    isos; the free-splitting extension satisfies identity and composition
    on three-element carriers; the slice equivalence round-trips; and the
    least envelope hom is the bottom map formula.
    """
    out: dict = {"checks": {}, "ok": True}
    ch3 = chain_poset(3)
    e3 = enumerate_canonical_idempotents(ch3, caps)
    out["checks"]["e_ch3_size"] = {"got": len(e3), "want": 4, "ok": len(e3) == 4}

    corpus5 = [
        one(),
        chain_poset(2),
        chain_poset(3),
        vee(),
        diamond(),
        chain_poset(4),
        chain_poset(5),
    ]
    pairs = 0
    agree_ok = True
    for d in corpus5:
        idems = enumerate_canonical_idempotents(d, caps)
        for p in idems:
            for q in idems:
                pairs += 1
                try:
                    idem_leq(p, q)
                except RelfixError:
                    agree_ok = False
    out["checks"]["order_conditions_agree"] = {"pairs": pairs, "ok": agree_ok}

    splits = 0
    split_ok = True
    for d in corpus5:
        for p in _all_idempotents(d):
            try:
                s = split_idempotent(p)
                splitting_iso(s, s)
                splits += 1
            except RelfixError:
                split_ok = False
    out["checks"]["splittings"] = {"instances": splits, "ok": split_ok}

    hat_ok = True
    hat_instances = 0
    hat_functor = Lift(Var())
    small = small_pointed_posets()
    objs = [
        KaroubiObj(d, p) for d in small for p in _all_idempotents(d)
    ]
    for a in objs:
        ia = hat_functor_mor(hat_functor, a.p.mor, a, a, caps)
        hat_instances += 1
        if not ia.is_identity():
            hat_ok = False
    for a, b, c in itertools.product(objs[:10], objs[:10], objs[:10]):
        if a.X.n + b.X.n + c.X.n > 7:
            continue
        for f in karoubi_homs(a, b, caps)[:3]:
            for g in karoubi_homs(b, c, caps)[:3]:
                hat_instances += 1
                lhs = hat_functor_mor(hat_functor, g @ f, a, c, caps)
                rhs = hat_functor_mor(hat_functor, g, b, c, caps) @ hat_functor_mor(
                    hat_functor, f, a, b, caps
                )
                if lhs != rhs:
                    hat_ok = False
    out["checks"]["hat_laws"] = {"instances": hat_instances, "ok": hat_ok}

    slice_ok = True
    cpo_ok = True
    for d in corpus5:
        rep = ed_slice_equivalence(d, caps)
        if not rep["ok"]:
            slice_ok = False
        repc = ed_cpo_check(d, caps)
        if not repc["ok"]:
            cpo_ok = False
    out["checks"]["slice_equivalence"] = {"posets": len(corpus5), "ok": slice_ok}
    out["checks"]["ed_cpo"] = {"posets": len(corpus5), "ok": cpo_ok}

    pointed_ok = True
    pointed_instances = 0
    for a in objs:
        for b in objs:
            if a.X.n * b.X.n > 9:
                continue
            homs = karoubi_homs(a, b, caps)
            bot = karoubi_bottom_hom(a, b)
            pointed_instances += 1
            if bot not in homs:
                pointed_ok = False
            if not all(bot.pointwise_leq(h) for h in homs):
                pointed_ok = False
    out["checks"]["pointed_homs"] = {"instances": pointed_instances, "ok": pointed_ok}

    ch2 = chain_poset(2)
    audit = karoubi_rel_fiber(
        KaroubiObj(ch2, Idempotent(ch2, MonotoneMap(ch2, ch2, (0, 0)))), caps
    )
    diag_pairs = diagonal(ch2).sorted_pairs()
    diag_seen = any(
        c["relation"] == diag_pairs
        for c in audit["claim_pstar_below"]["counterexamples"]
    )
    out["checks"]["claim_audit"] = {
        "fails_for": audit["claim_pstar_below"]["fails_for"],
        "diagonal_counterexample_recorded": diag_seen,
        "ok": diag_seen and audit["claim_pstar_below"]["fails_for"] > 0,
    }

    out["ok"] = all(v["ok"] for v in out["checks"].values())
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def all_suites() -> dict:
    return {
        "lemma2": lemma2_suite,
        "functor_laws": functor_laws_suite,
        "adjunction": adjunction_suite,
        "contractive": contractive_suite,
        "karoubi": karoubi_suite,
        "duality": duality_suite,
    }


def run_suite(name: str, caps: Caps = DEFAULT_CAPS) -> dict:
    """Run one suite by name ('all' runs every standard suite;
    'corrupted' runs the deliberately failing fixture)."""
    if name == "corrupted":
        return corrupted_action_suite(caps=caps)
    if name == "all":
        out: dict = {"suites": {}, "ok": True}
        for key, fn in all_suites().items():
            rep = fn(caps=caps)
            out["suites"][key] = rep
            if not rep["ok"]:
                out["ok"] = False
        return out
    suites = all_suites()
    if name not in suites:
        raise KeyError(name)
    return suites[name](caps=caps)
