"""The ordered-family-of-equivalences structure on relation families.

n-equality, dyadic distances, the later shift, Cauchy limits, and the
contractiveness check for the relational operator.

n-equality has three characterizations on uniform families, all computed
and cross-asserted here:

1. levelwise prefix equality: R_m = S_m for every m < n;
2. equal inverse images of the gluings under pi_{n-1};
3. pi_{n-1} a morphism in both directions between the gluings.

0-equality is the total relation (always true).  Families that are not
uniform have no gluing, so for them n-equality falls back to the prefix
characterization alone.

The contractiveness check is exhaustive whenever the space of uniform
families fits the budget.  When only the quotient by the top level fits,
it enumerates sections: every uniform family on the depth-(N-1) prefix,
extended by a canonical top level.  Sections decide the pair implication
exactly, because n ranges over 0..N and two uniform families with equal
levels below N fall in the same class for every such n, while the
operator's outputs at the compared levels are functions of the shared
prefix.  A sampled filler-independence check backs that argument for the
operator actually supplied.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .chain import (
    DomainChain,
    RelFamily,
    family_from_limit,
    glue_family,
    is_uniform_family,
    make_family,
)
from .engines import psi_step
from .errors import (
    CharacterizationMismatch,
    InternalInvariantViolation,
    NotCauchy,
    TypeMismatch,
)
from .functor import (
    Const,
    Fun,
    FunctorExpr,
    Lift,
    One,
    Prod,
    SumSep,
    Var,
    eval_rel,
    to_src,
)
from .poset import FinPoset
from .relations import (
    BinRel,
    direct_image,
    intersect,
    inverse_image,
    is_rel_morphism,
    rel_from_pairs,
    total_rel,
)

__all__ = [
    "prefix_equal",
    "n_equal",
    "Distance",
    "ofe_distance",
    "later_shift",
    "CauchySeq",
    "validate_cauchy",
    "cofe_limit",
    "uniform_space_size",
    "enumerate_uniform_masks",
    "sample_uniform_masks",
    "mask_to_rel",
    "rel_to_mask",
    "family_from_mask",
    "is_linear",
    "check_contractive",
]


# ---------------------------------------------------------------------------
# n-equality and distance
# ---------------------------------------------------------------------------


def prefix_equal(r: RelFamily, s: RelFamily, n: int) -> bool:
    """Levelwise equality strictly below level n."""
    return all(r[m] == s[m] for m in range(n))


def n_equal(chain: DomainChain, r: RelFamily, s: RelFamily, n: int) -> bool:
    """The n-th equivalence of the OFE on families.

    Valid for n in 0..N+1; (N+1)-equality is equality of whole families.
    On uniform families all three characterizations are evaluated and any
    disagreement raises CharacterizationMismatch (a bug signal, since the
    characterizations are provably equivalent there).
    """
    if not 0 <= n <= chain.depth + 1:
        raise TypeMismatch("n-equality index out of range", n=n, depth=chain.depth)
    by_prefix = prefix_equal(r, s, n)
    if is_uniform_family(r) and is_uniform_family(s):
        gr = glue_family(chain, r)
        gs = glue_family(chain, s)
        if n == 0:
            by_pi = by_morphism = True
        else:
            pi = chain.pi(n - 1)
            by_pi = inverse_image(pi, gr) == inverse_image(pi, gs)
            by_morphism = is_rel_morphism(pi, gr, gs) and is_rel_morphism(pi, gs, gr)
        if not by_prefix == by_pi == by_morphism:
            raise CharacterizationMismatch(
                "n-equality characterizations disagree",
                n=n,
                prefix=by_prefix,
                pi_inverse_image=by_pi,
                pi_morphism=by_morphism,
            )
    return by_prefix


@dataclass(frozen=True)
class Distance:
    """A dyadic distance; at_truncation marks "0 at truncation depth N"
    (equal through every representable level, not provably equal beyond)."""

    value: Fraction
    at_truncation: bool

    def __str__(self) -> str:
        if self.at_truncation:
            return "0 (at truncation depth)"
        return str(self.value)


def ofe_distance(chain: DomainChain, r: RelFamily, s: RelFamily) -> Distance:
    """2^-n for the greatest n with n-equality, 0 at the truncation cap."""
    n = 0
    while n <= chain.depth and n_equal(chain, r, s, n + 1):
        n += 1
    if n == chain.depth + 1:
        return Distance(Fraction(0), True)
    return Distance(Fraction(1, 2 ** n), False)


def later_shift(fam: RelFamily) -> RelFamily:
    """The later operator at truncation.

    Level 0 becomes total and level n+1 receives input level n, which is
    re-carriered by the direct image along the step embedding (the input
    top level falls off).  The output is generally not coherent, and the
    total family is preserved only at level 0 on non-constant chains;
    both are truncation artifacts of the carrier shift.
    """
    chain = fam.chain
    rels = [total_rel(chain.levels[0])]
    for m in range(chain.depth):
        rels.append(direct_image(chain.steps[m].e, fam[m]))
    return make_family(chain, rels)


# ---------------------------------------------------------------------------
# Cauchy sequences and limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CauchySeq:
    """A finite sequence of families with a claimed modulus.

    modulus[n] is an index from which on all terms are n-equal; it has one
    entry for each n in 0..N+1 and must be monotone.
    """

    terms: tuple
    modulus: tuple


def validate_cauchy(chain: DomainChain, seq: CauchySeq) -> None:
    """Check the Cauchy witness; raises NotCauchy with the failing data."""
    k = len(seq.terms)
    if k == 0:
        raise NotCauchy("empty sequence", n=0)
    if len(seq.modulus) != chain.depth + 2:
        raise NotCauchy(
            "modulus needs one entry per n in 0..N+1",
            got=len(seq.modulus),
            expected=chain.depth + 2,
        )
    for n in range(chain.depth + 1):
        if seq.modulus[n] > seq.modulus[n + 1]:
            raise NotCauchy("modulus not monotone", n=n)
    for t in seq.terms:
        if not is_uniform_family(t):
            raise NotCauchy("terms must be uniform families")
    for n, m in enumerate(seq.modulus):
        if not 0 <= m < k:
            raise NotCauchy("modulus index out of range", n=n, index=m)
        for i in range(m, k):
            for j in range(i + 1, k):
                if not n_equal(chain, seq.terms[i], seq.terms[j], n):
                    raise NotCauchy(
                        "witnessed n-equality fails", n=n, indices=(i, j)
                    )


def cofe_limit(chain: DomainChain, seq: CauchySeq) -> RelFamily:
    """The limit family of a Cauchy sequence.

    Follows the completeness proof: S_n is the inverse image under
    pi_{n-1} of the glued modulus-n tail term, the limit gluing is the
    intersection of the S_n, and the result is pulled back to a family.
    The proof's decreasing-chain property of the S_n and the n-equality
    of the limit with each tail are re-verified.
    """
    validate_cauchy(chain, seq)
    glued = {}

    def tail_glued(n: int) -> BinRel:
        m = seq.modulus[n]
        if m not in glued:
            glued[m] = glue_family(chain, seq.terms[m])
        return glued[m]

    esses = []
    for n in range(1, chain.depth + 2):
        esses.append(inverse_image(chain.pi(n - 1), tail_glued(n)))
    for i in range(len(esses) - 1):
        if not esses[i + 1] <= esses[i]:
            raise NotCauchy(
                "S-chain is not decreasing",
                n=i + 1,
                difference=sorted(esses[i + 1].pairs - esses[i].pairs)[:5],
            )
    limit_glued = intersect(esses, chain.top)
    fam = family_from_limit(chain, limit_glued)
    if not is_uniform_family(fam):
        raise InternalInvariantViolation("limit family is not uniform")
    for n in range(chain.depth + 2):
        if not n_equal(chain, fam, seq.terms[seq.modulus[n]], n):
            raise NotCauchy("limit is not n-equal to its tail", n=n)
    return fam


# ---------------------------------------------------------------------------
# the uniform space as downsets of the truncation forest
# ---------------------------------------------------------------------------
#
# A relation on X_L is uniform iff it contains the bottom pair and is
# closed under every truncation endomap pi_j applied to both components.
# The pi-images of a pair form a chain down to (bot, bot), so uniform
# relations are exactly the down-closed pair sets of the ancestry forest
# that contain the root; they can be counted, enumerated and sampled by
# tree products.


def _pair_forest(carrier: FinPoset, pi_tables: list) -> tuple:
    """Parent index per pair (ancestry forest) and the root pair index."""
    k = carrier.n
    root = carrier.bottom * k + carrier.bottom
    parent = [None] * (k * k)
    for x in range(k):
        for y in range(k):
            q = x * k + y
            if q == root:
                continue
            for t in reversed(pi_tables):
                a = t[x] * k + t[y]
                if a != q:
                    parent[q] = a
                    break
    return parent, root


def _forest_children(parent: list, root: int) -> dict:
    children: dict = {q: [] for q in range(len(parent))}
    for q, p in enumerate(parent):
        if p is not None:
            children[p].append(q)
    return children


def _count_downsets(children: dict, root: int) -> int:
    def ways(node: int) -> int:
        w = 1
        for c in children[node]:
            w *= ways(c)
        return 1 + w

    total = 1
    for c in children[root]:
        total *= ways(c)
    return total


def _level_pis(chain: DomainChain, level: int) -> list:
    return [chain.level_pi(j, level).table for j in range(level + 1)]


def uniform_space_size(chain: DomainChain, level: int | None = None) -> int:
    """Exact number of uniform admissible relations on X_level."""
    level = chain.depth if level is None else level
    parent, root = _pair_forest(chain.levels[level], _level_pis(chain, level))
    return _count_downsets(_forest_children(parent, root), root)


def _tree_masks(children: dict, node: int) -> list:
    """All downset bitmasks of the subtree at node (including empty)."""
    sub = [1 << node]
    for c in children[node]:
        sub = [m | cm for m in sub for cm in _tree_masks(children, c)]
    return [0] + sub


def enumerate_uniform_masks(chain: DomainChain, level: int | None = None):
    """Yield every uniform relation on X_level as a pair bitmask.

    The bit for pair (x, y) is x * k + y with k the carrier size; the
    root bit (bottom pair) is always set.
    """
    level = chain.depth if level is None else level
    parent, root = _pair_forest(chain.levels[level], _level_pis(chain, level))
    children = _forest_children(parent, root)
    per_tree = [_tree_masks(children, c) for c in children[root]]
    base = 1 << root
    if not per_tree:
        yield base
        return
    for combo in itertools.product(*per_tree):
        m = base
        for c in combo:
            m |= c
        yield m


def sample_uniform_masks(
    chain: DomainChain, count: int, seed: int, level: int | None = None
):
    """Seeded uniform-ish sample of the downset space (with replacement)."""
    level = chain.depth if level is None else level
    parent, root = _pair_forest(chain.levels[level], _level_pis(chain, level))
    children = _forest_children(parent, root)
    rng = random.Random(seed)

    def ways(node: int) -> int:
        w = 1
        for c in children[node]:
            w *= ways(c)
        return 1 + w

    wcache = {c: ways(c) for c in range(len(parent))}

    def pick(node: int) -> int:
        w = wcache[node]
        if rng.randrange(w) == 0:
            return 0
        m = 1 << node
        for c in children[node]:
            m |= pick(c)
        return m

    for _ in range(count):
        m = 1 << root
        for c in children[root]:
            m |= pick(c)
        yield m


def mask_to_rel(carrier: FinPoset, mask: int) -> BinRel:
    k = carrier.n
    pairs = set()
    q = 0
    while mask:
        if mask & 1:
            pairs.add((q // k, q % k))
        mask >>= 1
        q += 1
    return rel_from_pairs(carrier, pairs)


def rel_to_mask(rel: BinRel) -> int:
    k = rel.carrier.n
    m = 0
    for x, y in rel.pairs:
        m |= 1 << (x * k + y)
    return m


def _pair_embedding(chain: DomainChain, m: int, level: int) -> list:
    """Pair-index map X_m -> X_level along the cumulative embedding."""
    e = chain.ep(m, level).e.table
    km, kl = chain.levels[m].n, chain.levels[level].n
    return [e[q // km] * kl + e[q % km] for q in range(km * km)]


def family_from_mask(chain: DomainChain, mask: int, level: int) -> RelFamily:
    """The family of the uniform relation given as a bitmask on X_level.

    Only levels 0..level are derived from the mask; when level < N the
    remaining levels are filled by direct images along the steps, which
    keeps the family uniform.
    """
    rels = []
    for m in range(level + 1):
        emb = _pair_embedding(chain, m, level)
        km = chain.levels[m].n
        pairs = {
            (q // km, q % km) for q in range(km * km) if (mask >> emb[q]) & 1
        }
        rels.append(rel_from_pairs(chain.levels[m], pairs))
    for m in range(level, chain.depth):
        rels.append(direct_image(chain.steps[m].e, rels[-1]))
    return make_family(chain, rels)


# ---------------------------------------------------------------------------
# compiled relational action
# ---------------------------------------------------------------------------


def _has_var(f: FunctorExpr) -> bool:
    if isinstance(f, Var):
        return True
    if isinstance(f, (One, Const)):
        return False
    if isinstance(f, Lift):
        return _has_var(f.body)
    return _has_var(f.left) or _has_var(f.right)


def is_linear(f: FunctorExpr) -> bool:
    """True when R |-> eval_rel(f, R, R) distributes over unions of pairs.

    Holds when no Fun node contains the variable and no Prod node has the
    variable on both sides; the level action is then a base mask plus a
    per-input-pair push, which the contractiveness check exploits.
    """
    if isinstance(f, (One, Const, Var)):
        return True
    if isinstance(f, Lift):
        return is_linear(f.body)
    if isinstance(f, SumSep):
        return is_linear(f.left) and is_linear(f.right)
    if isinstance(f, Prod):
        if _has_var(f.left) and _has_var(f.right):
            return False
        return is_linear(f.left) and is_linear(f.right)
    if isinstance(f, Fun):
        return not (_has_var(f.left) or _has_var(f.right))
    raise TypeMismatch("unknown functor node", node=type(f).__name__)


def _compile_level_action(chain: DomainChain, m: int) -> list:
    """Probe masks for level m: out(R) = OR of probe[q] over q in R.

    Valid for linear functors; probe[q] is the action on the admissible
    relation {bottom pair, q}, which already folds in the base term.
    """
    dom = chain.levels[m]
    cod = chain.levels[m + 1]
    k, kc = dom.n, cod.n
    b = dom.bottom
    probes = []
    for q in range(k * k):
        pairs = {(b, b), (q // k, q % k)}
        out = eval_rel(
            chain.functor,
            rel_from_pairs(dom, pairs),
            rel_from_pairs(dom, pairs),
            chain.caps,
        )
        mask = 0
        for x, y in out.pairs:
            mask |= 1 << (x * kc + y)
        probes.append(mask)
    return probes


def _verify_compiled(chain: DomainChain, m: int, probes: list, seed: int) -> None:
    dom = chain.levels[m]
    k = dom.n
    rng = random.Random(seed ^ (m + 1))
    for _ in range(5):
        pairs = {(dom.bottom, dom.bottom)}
        for q in range(k * k):
            if rng.random() < 0.4:
                pairs.add((q // k, q % k))
        rel = rel_from_pairs(dom, pairs)
        direct = eval_rel(chain.functor, rel, rel, chain.caps)
        mask = 0
        for x, y in pairs:
            mask |= probes[x * k + y]
        if mask != rel_to_mask(direct):
            raise InternalInvariantViolation(
                "compiled relational action disagrees with eval_rel", level=m
            )


# ---------------------------------------------------------------------------
# contractiveness
# ---------------------------------------------------------------------------


def check_contractive(
    chain: DomainChain,
    op=None,
    full_budget: int = 60_000,
    section_budget: int = 2_000_000,
    samples: int = 20_000,
    seed: int = 0,
) -> dict:
    """Check that op improves n-equality: n_equal(R, S, n) implies
    n_equal(op R, op S, n+1), over the space of uniform families.

    Report-valued (never raises on counterexamples).  Strategy:

    * full: the whole space of uniform relations on X_N fits full_budget;
      every family is enumerated and op applied to each.
    * sections: the space quotiented by the top level fits; every uniform
      family on the depth-(N-1) prefix is enumerated with a canonical top
      filler.  Exact for the default operator (whose compared outputs are
      functions of the prefix); a seeded filler-independence sample backs
      this for the operator actually used.  Requires the default op.
    * sampled: seeded sampling of the full space.

    The implication is decided by grouping: for each n, families sharing
    the prefix below n must produce outputs sharing the prefix below n+1;
    the first conflicting pair per n is reported as a counterexample.
    """
    depth = chain.depth
    space = uniform_space_size(chain)
    report: dict = {
        "functor": to_src(chain.functor),
        "depth": depth,
        "space_size": space,
        "op": "psi" if op is None else "custom",
        "counterexamples": [],
        "ok": True,
    }

    if space <= full_budget:
        strategy = "full"
        level = depth
        masks = enumerate_uniform_masks(chain, depth)
        group_ns = range(depth + 1)
    elif op is None and depth >= 1 and uniform_space_size(chain, depth - 1) <= section_budget:
        strategy = "sections"
        level = depth - 1
        masks = enumerate_uniform_masks(chain, depth - 1)
        group_ns = range(depth)
        report["section_space"] = uniform_space_size(chain, depth - 1)
    else:
        strategy = "sampled"
        level = depth
        masks = sample_uniform_masks(chain, samples, seed, depth)
        group_ns = range(depth + 1)
        report["seed"] = seed
    report["strategy"] = strategy

    # Per-level pair embeddings into the enumeration carrier, for deriving
    # the family levels that serve as group keys and operator inputs.
    embs = [_pair_embedding(chain, m, level) for m in range(level + 1)]
    sizes = [p.n for p in chain.levels]

    # Levels needed as keys or operator inputs: in section mode the top
    # group index is depth-1, so inputs stop at depth-2.
    max_in = (depth - 1) if strategy != "sections" else (depth - 2)

    compiled = None
    if op is None and is_linear(chain.functor):
        compiled = []
        for m in range(max_in + 1):
            probes = _compile_level_action(chain, m)
            _verify_compiled(chain, m, probes, seed)
            compiled.append(probes)
    report["compiled"] = compiled is not None

    memo: dict = {}

    def out_level(m: int, in_mask: int) -> int:
        """Operator output at level m+1 as a mask, from input level m."""
        key = (m, in_mask)
        if key not in memo:
            if compiled is not None:
                acc = 0
                v = in_mask
                probes = compiled[m]
                while v:
                    low = v & -v
                    acc |= probes[low.bit_length() - 1]
                    v ^= low
                memo[key] = acc
            else:
                rel = mask_to_rel(chain.levels[m], in_mask)
                memo[key] = rel_to_mask(
                    eval_rel(chain.functor, rel, rel, chain.caps)
                )
        return memo[key]

    generic_op = op if op is not None else psi_step

    def run_generic(mask: int) -> tuple:
        fam = family_from_mask(chain, mask, level)
        out = generic_op(chain, fam)
        return tuple(rel_to_mask(out[m]) for m in range(depth + 1))

    use_fast = compiled is not None and op is None
    groups: list = [dict() for _ in range(depth + 1)]
    enumerated = 0
    conflicts = report["counterexamples"]

    for mask in masks:
        enumerated += 1
        levels_in = []
        for m in range(max_in + 1):
            emb = embs[m]
            km = sizes[m]
            v = 0
            for q in range(km * km):
                if (mask >> emb[q]) & 1:
                    v |= 1 << q
            levels_in.append(v)
        if use_fast:
            outs = (1,) + tuple(
                out_level(m, levels_in[m]) for m in range(max_in + 1)
            )
        else:
            outs = run_generic(mask)
        for n in group_ns:
            key = tuple(levels_in[: min(n, max_in + 1)])
            want = outs[: n + 1]
            seen = groups[n].get(key)
            if seen is None:
                groups[n][key] = (want, mask)
            elif seen[0] != want:
                m_bad = next(i for i in range(n + 1) if seen[0][i] != want[i])
                conflicts.append(
                    {
                        "n": n,
                        "output_level": m_bad,
                        "mask_a": seen[1],
                        "mask_b": mask,
                    }
                )
                report["ok"] = False
        if len(conflicts) >= 5:
            report["stopped_early"] = True
            break
    report["enumerated"] = enumerated

    if strategy == "sections":
        # the filler-independence sample: rebuilding the same sections with
        # the projection-based filler must not change the operator output
        filler_ok = True
        checked = 0
        for mask in itertools.islice(
            sample_uniform_masks(chain, 64, seed + 1, depth - 1), 64
        ):
            fam_e = family_from_mask(chain, mask, depth - 1)
            prefix = list(fam_e.rels[:depth])
            alt_top = inverse_image(chain.steps[depth - 1].p, prefix[-1])
            fam_p = make_family(chain, prefix + [alt_top])
            if generic_op(chain, fam_e) != generic_op(chain, fam_p):
                filler_ok = False
                report["ok"] = False
                conflicts.append({"n": depth, "filler_pair_mask": mask})
                break
            checked += 1
        report["filler_independence"] = {"sampled": checked, "ok": filler_ok}

    return report
