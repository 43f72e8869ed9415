"""Mixed-variance functor expressions F(X-, X+) on finite pointed posets.

An expression is an AST over One, Const, Var, Lift, Prod, SumSep and Fun.
The recursion variable Var may occur with either polarity; Fun flips the
polarity of its left child.  Polarities are recomputed on demand by
var_polarities, which keeps the annotation consistent with the flipping
rule by construction.

Four actions share the AST:

* eval_obj  -- object action, producing a FinPoset
* eval_map  -- morphism action, producing a MonotoneMap
* eval_ep   -- action on embedding/projection pairs
* eval_rel  -- relational action, producing an admissible BinRel

The morphism action follows the usual mixed-variance contract: given
fneg : Xneg' -> Xneg (contravariant direction) and fpos : Xpos -> Xpos',
eval_map(F, fneg, fpos) maps eval_obj(F, Xneg, Xpos) to
eval_obj(F, Xneg', Xpos').  Either argument may be None when the
expression never consumes it (e.g. a covariant expression needs no fneg).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .ep import EpPair, verify_ep_pair
from .errors import (
    InadmissibleRelation,
    InternalInvariantViolation,
    LawViolation,
    NotEp,
    SizeCapExceeded,
    TypeMismatch,
)
from .poset import (
    FinPoset,
    MonotoneMap,
    chain_poset,
    enumerate_monotone_maps,
    hom_poset,
    identity_map,
    lift,
    one,
    product,
    sum_sep,
    validate_poset,
)
from .relations import (
    BinRel,
    bottom_rel,
    diagonal,
    is_admissible,
    is_rel_morphism,
    rel_from_pairs,
    total_rel,
)

__all__ = [
    "FunctorExpr",
    "One",
    "Var",
    "Const",
    "Lift",
    "Prod",
    "SumSep",
    "Fun",
    "var_polarities",
    "is_covariant",
    "validate_functor",
    "to_src",
    "eval_obj",
    "eval_map",
    "eval_ep",
    "eval_rel",
    "lift_map",
    "prod_map",
    "sum_map",
    "hom_map",
    "check_functor_laws",
    "default_law_pool",
]


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctorExpr:
    """Base class for functor expression nodes."""

    def __str__(self) -> str:
        return to_src(self)


@dataclass(frozen=True)
class One(FunctorExpr):
    """The constant one-point poset."""


@dataclass(frozen=True)
class Var(FunctorExpr):
    """The recursion variable."""


@dataclass(frozen=True)
class Const(FunctorExpr):
    """A constant poset together with its chosen admissible relation."""

    poset: FinPoset
    rel: BinRel


@dataclass(frozen=True)
class Lift(FunctorExpr):
    body: FunctorExpr


@dataclass(frozen=True)
class Prod(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr


@dataclass(frozen=True)
class SumSep(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr


@dataclass(frozen=True)
class Fun(FunctorExpr):
    """Function space; the left child is contravariant."""

    left: FunctorExpr
    right: FunctorExpr


def var_polarities(f: FunctorExpr, sign: int = 1) -> frozenset:
    """Polarities (+1/-1) at which Var occurs in f."""
    if isinstance(f, Var):
        return frozenset((sign,))
    if isinstance(f, (One, Const)):
        return frozenset()
    if isinstance(f, Lift):
        return var_polarities(f.body, sign)
    if isinstance(f, Fun):
        return var_polarities(f.left, -sign) | var_polarities(f.right, sign)
    if isinstance(f, (Prod, SumSep)):
        return var_polarities(f.left, sign) | var_polarities(f.right, sign)
    raise TypeMismatch("unknown functor node", node=type(f).__name__)


def is_covariant(f: FunctorExpr) -> bool:
    return -1 not in var_polarities(f)


def validate_functor(f: FunctorExpr) -> frozenset:
    """Check Const invariants throughout f; return its Var polarities."""
    if isinstance(f, Const):
        if f.rel.carrier != f.poset:
            raise TypeMismatch("const relation lives on a different poset")
        if not is_admissible(f.rel):
            raise InadmissibleRelation(
                "const relation misses the bottom pair", functor=to_src(f)
            )
    elif isinstance(f, Lift):
        validate_functor(f.body)
    elif isinstance(f, (Prod, SumSep, Fun)):
        validate_functor(f.left)
        validate_functor(f.right)
    return var_polarities(f)


def to_src(f: FunctorExpr) -> str:
    """Surface syntax for an expression (Var prints as the name D)."""
    if isinstance(f, One):
        return "one"
    if isinstance(f, Var):
        return "D"
    if isinstance(f, Const):
        return f"const({f.poset.label or f.poset.n}, {len(f.rel.pairs)} pairs)"
    if isinstance(f, Lift):
        return f"lift({to_src(f.body)})"
    if isinstance(f, Prod):
        return f"prod({to_src(f.left)}, {to_src(f.right)})"
    if isinstance(f, SumSep):
        return f"sum({to_src(f.left)}, {to_src(f.right)})"
    if isinstance(f, Fun):
        return f"fun({to_src(f.left)}, {to_src(f.right)})"
    raise TypeMismatch("unknown functor node", node=type(f).__name__)


# ---------------------------------------------------------------------------
# cached constructions with injection data
# ---------------------------------------------------------------------------
#
# The injection positions recovered here depend only on order structure (the
# canonical permutation is a function of the leq matrix), so caching on the
# structural identity of the argument posets is sound even though descriptor
# metadata may differ between structurally equal posets.

_ONE = one()
_ONE_REL = total_rel(_ONE)


@lru_cache(maxsize=None)
def _lift_c(x: FinPoset, caps: Caps):
    p = lift(x, caps)
    ups = tuple(p.elem_index[("up", d)] for d in x.elems)
    return p, p.elem_index["bot"], ups


@lru_cache(maxsize=None)
def _prod_c(x: FinPoset, y: FinPoset, caps: Caps):
    p = product(x, y, caps)
    idx = np.array(
        [[p.elem_index[(dx, dy)] for dy in y.elems] for dx in x.elems],
        dtype=np.int64,
    )
    idx.setflags(write=False)
    return p, idx


@lru_cache(maxsize=None)
def _sum_c(x: FinPoset, y: FinPoset, caps: Caps):
    p = sum_sep(x, y, caps)
    inl = tuple(p.elem_index[("inl", d)] for d in x.elems)
    inr = tuple(p.elem_index[("inr", d)] for d in y.elems)
    return p, p.elem_index["bot"], inl, inr


@lru_cache(maxsize=None)
def _hom_c(x: FinPoset, y: FinPoset, caps: Caps) -> FinPoset:
    return hom_poset(x, y, caps)


# ---------------------------------------------------------------------------
# object action
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def eval_obj(
    f: FunctorExpr,
    xneg: FinPoset | None,
    xpos: FinPoset | None,
    caps: Caps = DEFAULT_CAPS,
) -> FinPoset:
    """Evaluate the object action F(xneg, xpos).

    A slot may be None when no Var of that polarity occurs; consuming a
    None slot raises TypeMismatch.
    """
    if isinstance(f, One):
        return _ONE
    if isinstance(f, Var):
        if xpos is None:
            raise TypeMismatch("Var needs a poset in its slot", functor=to_src(f))
        return xpos
    if isinstance(f, Const):
        return f.poset
    if isinstance(f, Lift):
        return _lift_c(eval_obj(f.body, xneg, xpos, caps), caps)[0]
    if isinstance(f, Prod):
        return _prod_c(
            eval_obj(f.left, xneg, xpos, caps),
            eval_obj(f.right, xneg, xpos, caps),
            caps,
        )[0]
    if isinstance(f, SumSep):
        return _sum_c(
            eval_obj(f.left, xneg, xpos, caps),
            eval_obj(f.right, xneg, xpos, caps),
            caps,
        )[0]
    if isinstance(f, Fun):
        return _hom_c(
            eval_obj(f.left, xpos, xneg, caps),
            eval_obj(f.right, xneg, xpos, caps),
            caps,
        )
    raise TypeMismatch("unknown functor node", node=type(f).__name__)


# ---------------------------------------------------------------------------
# morphism action
# ---------------------------------------------------------------------------


def lift_map(inner: MonotoneMap, caps: Caps = DEFAULT_CAPS) -> MonotoneMap:
    """Lift a map: fresh bottoms correspond, up-elements follow inner."""
    dom, dbot, dups = _lift_c(inner.dom, caps)
    cod, cbot, cups = _lift_c(inner.cod, caps)
    table = [cbot] * dom.n
    for i, src in enumerate(dups):
        table[src] = cups[inner.table[i]]
    return MonotoneMap(dom, cod, tuple(table))


def prod_map(fl: MonotoneMap, fr: MonotoneMap, caps: Caps = DEFAULT_CAPS) -> MonotoneMap:
    """Componentwise action on a product."""
    dom, didx = _prod_c(fl.dom, fr.dom, caps)
    cod, cidx = _prod_c(fl.cod, fr.cod, caps)
    table = [0] * dom.n
    for i in range(fl.dom.n):
        for j in range(fr.dom.n):
            table[didx[i, j]] = int(cidx[fl.table[i], fr.table[j]])
    return MonotoneMap(dom, cod, tuple(table))


def sum_map(fl: MonotoneMap, fr: MonotoneMap, caps: Caps = DEFAULT_CAPS) -> MonotoneMap:
    """Injection-respecting action on a separated sum."""
    dom, dbot, dinl, dinr = _sum_c(fl.dom, fr.dom, caps)
    cod, cbot, cinl, cinr = _sum_c(fl.cod, fr.cod, caps)
    table = [cbot] * dom.n
    for i, src in enumerate(dinl):
        table[src] = cinl[fl.table[i]]
    for i, src in enumerate(dinr):
        table[src] = cinr[fr.table[i]]
    return MonotoneMap(dom, cod, tuple(table))


def hom_map(am: MonotoneMap, bm: MonotoneMap, caps: Caps = DEFAULT_CAPS) -> MonotoneMap:
    """The action h |-> bm . h . am : hom(am.cod, bm.dom) -> hom(am.dom, bm.cod)."""
    dom = _hom_c(am.cod, bm.dom, caps)
    cod = _hom_c(am.dom, bm.cod, caps)
    cindex = cod.elem_index
    table = []
    for t in dom.elems:
        comp = tuple(bm.table[t[am.table[x]]] for x in range(am.dom.n))
        table.append(cindex[comp])
    return MonotoneMap(dom, cod, tuple(table))


def eval_map(
    f: FunctorExpr,
    fneg: MonotoneMap | None,
    fpos: MonotoneMap | None,
    caps: Caps = DEFAULT_CAPS,
) -> MonotoneMap:
    """Morphism action of f.

    fneg runs in the contravariant direction (Xneg' -> Xneg), fpos in the
    covariant one (Xpos -> Xpos'); the result maps eval_obj(f, Xneg, Xpos)
    to eval_obj(f, Xneg', Xpos').  A None argument is permitted whenever f
    never consumes that slot.
    """
    if isinstance(f, One):
        return identity_map(_ONE)
    if isinstance(f, Var):
        if fpos is None:
            raise TypeMismatch("Var needs a map in its slot", functor=to_src(f))
        return fpos
    if isinstance(f, Const):
        return identity_map(f.poset)
    if isinstance(f, Lift):
        return lift_map(eval_map(f.body, fneg, fpos, caps), caps)
    if isinstance(f, Prod):
        return prod_map(
            eval_map(f.left, fneg, fpos, caps),
            eval_map(f.right, fneg, fpos, caps),
            caps,
        )
    if isinstance(f, SumSep):
        return sum_map(
            eval_map(f.left, fneg, fpos, caps),
            eval_map(f.right, fneg, fpos, caps),
            caps,
        )
    if isinstance(f, Fun):
        am = eval_map(f.left, fpos, fneg, caps)
        bm = eval_map(f.right, fneg, fpos, caps)
        return hom_map(am, bm, caps)
    raise TypeMismatch("unknown functor node", node=type(f).__name__)


def eval_ep(f: FunctorExpr, ep: EpPair, caps: Caps = DEFAULT_CAPS) -> EpPair:
    """Action on an embedding/projection pair.

    F(p, e) is the embedding and F(e, p) the projection; both laws are
    re-verified, and a failure is an internal bug, not a user error.
    """
    e2 = eval_map(f, ep.p, ep.e, caps)
    p2 = eval_map(f, ep.e, ep.p, caps)
    try:
        return verify_ep_pair(e2, p2)
    except NotEp as exc:
        raise InternalInvariantViolation(
            "functor action broke the ep laws", functor=to_src(f), cause=str(exc)
        ) from exc


# ---------------------------------------------------------------------------
# relational action
# ---------------------------------------------------------------------------


def eval_rel(
    f: FunctorExpr,
    rneg: BinRel | None,
    spos: BinRel | None,
    caps: Caps = DEFAULT_CAPS,
) -> BinRel:
    """Relational action F(rneg, spos); inputs and output are admissible."""
    for r in (rneg, spos):
        if r is not None and not is_admissible(r):
            raise InadmissibleRelation(
                "relational action needs admissible inputs", functor=to_src(f)
            )
    out = _eval_rel(f, rneg, spos, caps)
    if not is_admissible(out):
        raise InternalInvariantViolation(
            "relational action produced an inadmissible relation", functor=to_src(f)
        )
    return out


def _eval_rel(f, rneg, spos, caps) -> BinRel:
    if isinstance(f, One):
        return _ONE_REL
    if isinstance(f, Var):
        if spos is None:
            raise TypeMismatch("Var needs a relation in its slot", functor=to_src(f))
        return spos
    if isinstance(f, Const):
        return f.rel
    if isinstance(f, Lift):
        r = _eval_rel(f.body, rneg, spos, caps)
        p, bot, ups = _lift_c(r.carrier, caps)
        pairs = {(bot, bot)}
        pairs.update((ups[a], ups[b]) for a, b in r.pairs)
        return BinRel(p, frozenset(pairs))
    if isinstance(f, Prod):
        rl = _eval_rel(f.left, rneg, spos, caps)
        rr = _eval_rel(f.right, rneg, spos, caps)
        if len(rl.pairs) * len(rr.pairs) > caps.max_pairs:
            raise SizeCapExceeded(
                "product relation would be too large",
                size=len(rl.pairs) * len(rr.pairs),
                cap=caps.max_pairs,
            )
        p, idx = _prod_c(rl.carrier, rr.carrier, caps)
        pairs = frozenset(
            (int(idx[a1, b1]), int(idx[a2, b2]))
            for a1, a2 in rl.pairs
            for b1, b2 in rr.pairs
        )
        return BinRel(p, pairs)
    if isinstance(f, SumSep):
        rl = _eval_rel(f.left, rneg, spos, caps)
        rr = _eval_rel(f.right, rneg, spos, caps)
        p, bot, inl, inr = _sum_c(rl.carrier, rr.carrier, caps)
        pairs = {(bot, bot)}
        pairs.update((inl[a], inl[b]) for a, b in rl.pairs)
        pairs.update((inr[a], inr[b]) for a, b in rr.pairs)
        return BinRel(p, frozenset(pairs))
    if isinstance(f, Fun):
        ra = _eval_rel(f.left, spos, rneg, caps)
        rb = _eval_rel(f.right, rneg, spos, caps)
        h = _hom_c(ra.carrier, rb.carrier, caps)
        tables = np.array(h.elems, dtype=np.int64)
        rbm = rb.matrix
        if ra.pairs:
            ax = np.fromiter((a for a, _ in ra.pairs), dtype=np.int64)
            ay = np.fromiter((b for _, b in ra.pairs), dtype=np.int64)
            ok = rbm[tables[:, None, ax], tables[None, :, ay]].all(axis=2)
        else:
            ok = np.ones((h.n, h.n), dtype=bool)
        pairs = frozenset((int(i), int(j)) for i, j in np.argwhere(ok))
        return BinRel(h, pairs)
    raise TypeMismatch("unknown functor node", node=type(f).__name__)


# ---------------------------------------------------------------------------
# law checking
# ---------------------------------------------------------------------------


def default_law_pool() -> list[FinPoset]:
    """Every pointed poset with at most 3 elements, up to isomorphism."""
    vee = validate_poset(3, [(0, 1), (0, 2)], 0, "vee")
    return [one(), chain_poset(2), chain_poset(3), vee]


def _law_rels(p: FinPoset) -> list[BinRel]:
    """A small admissible-relation pool on p for the relational law."""
    leq_pairs = frozenset((int(i), int(j)) for i, j in np.argwhere(p.leq))
    geq_pairs = frozenset((j, i) for i, j in leq_pairs)
    rels = [
        bottom_rel(p),
        diagonal(p),
        rel_from_pairs(p, leq_pairs),
        rel_from_pairs(p, geq_pairs),
        total_rel(p),
    ]
    seen, out = set(), []
    for r in rels:
        if r.pairs not in seen:
            seen.add(r.pairs)
            out.append(r)
    return out


def check_functor_laws(
    f: FunctorExpr,
    budget: int = 20_000,
    action=None,
    caps: Caps = DEFAULT_CAPS,
    pool: list[FinPoset] | None = None,
) -> dict:
    """Verify functor laws on enumerated small inputs.

    Checks, each against its own instance budget: preservation of
    identities; preservation of composition; monotonicity of the morphism
    action; and relational functoriality (u : R' -> R and v : S -> S'
    imply F(u, v) : F(R, S) -> F(R', S')).  Raises LawViolation with the
    law name and a witness; returns a per-law instance report.

    The action argument substitutes an alternative morphism action with
    eval_map's signature (used to exercise deliberately broken actions).
    """
    act = action if action is not None else eval_map
    posets = pool if pool is not None else default_law_pool()
    maps_cache: dict = {}

    def maps_between(x: FinPoset, y: FinPoset) -> list[MonotoneMap]:
        key = (x, y)
        if key not in maps_cache:
            maps_cache[key] = [
                MonotoneMap(x, y, t) for t in enumerate_monotone_maps(x, y)
            ]
        return maps_cache[key]

    def name(p: FinPoset) -> str:
        return p.label or f"poset{p.n}"

    report: dict = {
        "functor": to_src(f),
        "pool": [name(p) for p in posets],
        "budget": budget,
        "laws": {},
    }

    def run(law: str, instances) -> None:
        count = 0
        complete = True
        for witness in instances:
            if count >= budget:
                complete = False
                break
            count += 1
            if witness is not None:
                raise LawViolation(f"functor law failed: {law}", law=law, **witness)
        report["laws"][law] = {"instances": count, "complete": complete}

    def identity_instances():
        for x, y in itertools.product(posets, repeat=2):
            m = act(f, identity_map(x), identity_map(y), caps)
            yield None if m.is_identity() else {
                "neg": name(x), "pos": name(y), "image": list(m.table)
            }

    def composition_instances():
        for a, b, c in itertools.product(posets, repeat=3):
            for fn1 in maps_between(b, a):
                for fn2 in maps_between(c, b):
                    for fp1 in maps_between(a, b):
                        for fp2 in maps_between(b, c):
                            lhs = act(f, fn1 @ fn2, fp2 @ fp1, caps)
                            rhs = act(f, fn2, fp2, caps) @ act(f, fn1, fp1, caps)
                            yield None if lhs == rhs else {
                                "posets": [name(a), name(b), name(c)],
                                "fneg": [list(fn1.table), list(fn2.table)],
                                "fpos": [list(fp1.table), list(fp2.table)],
                            }

    def monotonicity_instances():
        for a, b in itertools.product(posets, repeat=2):
            negs = maps_between(b, a)
            poss = maps_between(a, b)
            for n1, n2 in itertools.product(negs, repeat=2):
                if not n1.pointwise_leq(n2):
                    continue
                for p1, p2 in itertools.product(poss, repeat=2):
                    if not p1.pointwise_leq(p2):
                        continue
                    lo = act(f, n1, p1, caps)
                    hi = act(f, n2, p2, caps)
                    yield None if lo.pointwise_leq(hi) else {
                        "posets": [name(a), name(b)],
                        "fneg": [list(n1.table), list(n2.table)],
                        "fpos": [list(p1.table), list(p2.table)],
                    }

    def relational_instances():
        for xp, x, y, yp in itertools.product(posets, repeat=4):
            for u in maps_between(xp, x):
                for v in maps_between(y, yp):
                    for rp in _law_rels(xp):
                        for r in _law_rels(x):
                            if not is_rel_morphism(u, rp, r):
                                continue
                            for s in _law_rels(y):
                                for sp in _law_rels(yp):
                                    if not is_rel_morphism(v, s, sp):
                                        continue
                                    m = act(f, u, v, caps)
                                    big = eval_rel(f, r, s, caps)
                                    small = eval_rel(f, rp, sp, caps)
                                    ok = is_rel_morphism(m, big, small)
                                    yield None if ok else {
                                        "posets": [name(xp), name(x), name(y), name(yp)],
                                        "u": list(u.table),
                                        "v": list(v.table),
                                        "R'": sorted(rp.pairs),
                                        "R": sorted(r.pairs),
                                        "S": sorted(s.pairs),
                                        "S'": sorted(sp.pairs),
                                    }

    run("identity", identity_instances())
    run("composition", composition_instances())
    run("monotonicity", monotonicity_instances())
    run("relational", relational_instances())
    report["ok"] = True
    return report
