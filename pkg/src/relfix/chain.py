"""Inverse-limit chains at finite depth.

A DomainChain truncates the recursive domain equation D = F(D, D) at a
chosen depth N: levels X_0 = 1 and X_{i+1} = eval_obj(F, X_i, X_i), with
the identification of F(X_i, X_i) and X_{i+1} being literal equality (the
mediating isomorphism is the identity by construction).  The connecting
embedding/projection pairs are step_0 = the bottom pair into X_1 and
step_{i+1} = eval_ep(F, step_i).

The depth-N poset X_N stands in for the bilimit; every statement about
the true limit is replaced by its level-N instance.  In particular the
truncation projections pi_0 <= pi_1 <= ... <= pi_N reach the identity at
j = N instead of converging to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import Caps, DEFAULT_CAPS
from .ep import EpPair, bottom_ep, compose_ep, identity_ep
from .errors import (
    DualMismatch,
    InadmissibleRelation,
    LawViolation,
    SizeCapExceeded,
    TypeMismatch,
)
from .functor import FunctorExpr, eval_ep, eval_map, eval_obj, to_src, validate_functor
from .poset import FinPoset, MonotoneMap, one
from .relations import (
    BinRel,
    bottom_rel,
    diagonal,
    direct_image,
    intersect,
    inverse_image,
    is_admissible,
    is_rel_morphism,
    rel_morphism_witness,
    total_rel,
)

__all__ = [
    "DomainChain",
    "RelFamily",
    "build_chain",
    "truncation_projections",
    "glue_family",
    "make_family",
    "total_family",
    "bottom_family",
    "diagonal_family",
    "family_from_limit",
    "coherence_witness",
    "is_coherent",
    "levelwise_uniform_witness",
    "is_levelwise_uniform",
    "is_uniform_family",
]


class DomainChain:
    """The truncated chain X_0 .. X_N with its e/p structure.

    Immutable once built; construct through build_chain, which also runs
    the invariant checks.
    """

    def __init__(
        self,
        functor: FunctorExpr,
        depth: int,
        levels: tuple,
        steps: tuple,
        caps: Caps,
    ):
        self.functor = functor
        self.depth = depth
        self.levels = levels
        self.steps = steps
        self.caps = caps
        self._ep: dict = {}

    def __repr__(self) -> str:
        sizes = [p.n for p in self.levels]
        return f"<DomainChain {to_src(self.functor)} depth={self.depth} sizes={sizes}>"

    def ep(self, j: int, n: int) -> EpPair:
        """The composite EpPair X_j -> X_n for j <= n."""
        if not 0 <= j <= n <= self.depth:
            raise TypeMismatch("ep indices out of range", j=j, n=n, depth=self.depth)
        key = (j, n)
        if key not in self._ep:
            if j == n:
                self._ep[key] = identity_ep(self.levels[j])
            else:
                self._ep[key] = compose_ep(self.ep(j, n - 1), self.steps[n - 1])
        return self._ep[key]

    def cum(self, j: int) -> EpPair:
        """The cumulative EpPair X_j -> X_N."""
        return self.ep(j, self.depth)

    def level_pi(self, j: int, n: int) -> MonotoneMap:
        """The truncation endomap e . p : X_n -> X_n through level j <= n."""
        pair = self.ep(j, n)
        return pair.e @ pair.p

    def pi(self, j: int) -> MonotoneMap:
        """The truncation projection pi_j on the top level X_N."""
        return self.level_pi(j, self.depth)

    @property
    def top(self) -> FinPoset:
        return self.levels[self.depth]

    @property
    def pis(self) -> list[MonotoneMap]:
        return [self.pi(j) for j in range(self.depth + 1)]


def build_chain(f: FunctorExpr, depth: int, caps: Caps = DEFAULT_CAPS) -> DomainChain:
    """Build and verify the depth-N chain for the functor expression f.

    Verifies, at every level: the ep laws of each step (inside eval_ep);
    pi_0 = the constant-bottom endomap; the pis increase to the identity;
    idempotence; and the recurrence pi_{j+1} on X_{n+1} equals
    eval_map(f, pi_j on X_n, pi_j on X_n).
    """
    if depth < 0:
        raise TypeMismatch("depth must be nonnegative", depth=depth)
    validate_functor(f)
    levels = [one()]
    for i in range(depth):
        try:
            levels.append(eval_obj(f, levels[-1], levels[-1], caps))
        except SizeCapExceeded as exc:
            raise SizeCapExceeded(
                f"level {i + 1} of the chain exceeds the size caps: {exc}",
                level=i + 1,
                functor=to_src(f),
                **exc.details,
            ) from exc
    steps = []
    if depth >= 1:
        steps.append(bottom_ep(levels[0], levels[1]))
        for i in range(1, depth):
            steps.append(eval_ep(f, steps[-1], caps))
    chain = DomainChain(f, depth, tuple(levels), tuple(steps), caps)
    _verify_chain(chain)
    return chain


def _verify_chain(chain: DomainChain) -> None:
    n = chain.depth
    f = chain.functor

    def fail(check: str, **details):
        raise LawViolation(
            f"chain invariant failed: {check}",
            check=check,
            functor=to_src(f),
            depth=n,
            **details,
        )

    top = chain.top
    ident = tuple(range(top.n))
    if chain.pi(n).table != ident:
        fail("pi_N is the identity")
    for m in range(n + 1):
        bot = chain.levels[m].bottom
        if chain.level_pi(0, m).table != (bot,) * chain.levels[m].n:
            fail("pi_0 is constant bottom", level=m)
    for j in range(n + 1):
        pj = chain.pi(j)
        if (pj @ pj) != pj:
            fail("pi_j idempotent", j=j)
        if not pj.pointwise_leq(chain.pi(min(j + 1, n))):
            fail("pi_j increasing", j=j)
        if not pj.pointwise_leq(MonotoneMap(top, top, ident)):
            fail("pi_j below identity", j=j)
    for m in range(n):
        for j in range(m + 1):
            pi_low = chain.level_pi(j, m)
            lhs = chain.level_pi(j + 1, m + 1)
            rhs = eval_map(f, pi_low, pi_low, chain.caps)
            if lhs != rhs:
                fail("pi recurrence", j=j, level=m, lhs=lhs.table, rhs=rhs.table)


def truncation_projections(chain: DomainChain) -> tuple[list[MonotoneMap], dict]:
    """Return pi_0..pi_N together with a verification report.

    The checks duplicate build_chain's (they are cheap), so the report can
    be produced for an already-built chain without trusting its history.
    """
    _verify_chain(chain)
    pis = chain.pis
    report = {
        "depth": chain.depth,
        "sizes": [p.n for p in chain.levels],
        "pis": [list(p.table) for p in pis],
        "checks": {
            "pi_0_constant_bottom": True,
            "pi_monotone_increase": True,
            "pi_idempotent": True,
            "pi_N_identity": True,
            "pi_recurrence": True,
        },
    }
    return pis, report


# ---------------------------------------------------------------------------
# relation families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelFamily:
    """A level-indexed family of admissible relations R_n on X_n.

    Families are the finite presentation of admissible relations on the
    bilimit; equality and hashing compare the relations only.
    """

    rels: tuple
    chain: DomainChain = field(compare=False, hash=False, repr=False)

    def __getitem__(self, n: int) -> BinRel:
        return self.rels[n]

    def __len__(self) -> int:
        return len(self.rels)

    def __repr__(self) -> str:
        return f"<RelFamily {[len(r.pairs) for r in self.rels]} pairs by level>"


def make_family(chain: DomainChain, rels) -> RelFamily:
    rels = tuple(rels)
    if len(rels) != chain.depth + 1:
        raise TypeMismatch(
            "family length must be depth + 1", got=len(rels), depth=chain.depth
        )
    for m, r in enumerate(rels):
        if r.carrier != chain.levels[m]:
            raise TypeMismatch("family level on the wrong carrier", level=m)
        if not is_admissible(r):
            raise InadmissibleRelation("family level misses the bottom pair", level=m)
    return RelFamily(rels, chain)


def total_family(chain: DomainChain) -> RelFamily:
    return RelFamily(tuple(total_rel(p) for p in chain.levels), chain)


def bottom_family(chain: DomainChain) -> RelFamily:
    return RelFamily(tuple(bottom_rel(p) for p in chain.levels), chain)


def diagonal_family(chain: DomainChain) -> RelFamily:
    return RelFamily(tuple(diagonal(p) for p in chain.levels), chain)


def family_from_limit(chain: DomainChain, rel: BinRel) -> RelFamily:
    """Pull a relation on X_N back to a family via the cumulative embeddings."""
    if rel.carrier != chain.top:
        raise TypeMismatch("relation must live on the top level")
    rels = tuple(
        inverse_image(chain.cum(m).e, rel) for m in range(chain.depth + 1)
    )
    return make_family(chain, rels)


def glue_family(chain: DomainChain, fam: RelFamily) -> BinRel:
    """Glue a coherent family to a single relation on X_N.

    Computes the intersection of inverse images along the cumulative
    projections and, independently, the union of direct images along the
    cumulative embeddings; the two asserts are a theorem for coherent
    families, so a mismatch is raised as a hard error.
    """
    top = chain.top
    via_p = intersect(
        [inverse_image(chain.cum(m).p, fam[m]) for m in range(chain.depth + 1)],
        top,
    )
    union: set = set()
    for m in range(chain.depth + 1):
        union.update(direct_image(chain.cum(m).e, fam[m]).pairs)
    via_e = BinRel(top, frozenset(union))
    if via_p != via_e:
        only_p = sorted(via_p.pairs - via_e.pairs)
        only_e = sorted(via_e.pairs - via_p.pairs)
        raise DualMismatch(
            "inverse-image and direct-image gluings disagree",
            only_inverse=only_p[:5],
            only_direct=only_e[:5],
        )
    return via_p


# ---------------------------------------------------------------------------
# family predicates
# ---------------------------------------------------------------------------


def coherence_witness(fam: RelFamily):
    """None if R_n = inverse_image(step_n.e, R_{n+1}) at every n, else a witness."""
    chain = fam.chain
    for m in range(chain.depth):
        back = inverse_image(chain.steps[m].e, fam[m + 1])
        if back != fam[m]:
            diff = back.pairs ^ fam[m].pairs
            return {"level": m, "difference": sorted(diff)[:5]}
    return None


def is_coherent(fam: RelFamily) -> bool:
    return coherence_witness(fam) is None


def levelwise_uniform_witness(fam: RelFamily):
    """None if every truncation endomap is a morphism R_n -> R_n, else a witness."""
    chain = fam.chain
    for m in range(chain.depth + 1):
        for j in range(m + 1):
            w = rel_morphism_witness(chain.level_pi(j, m), fam[m], fam[m])
            if w is not None:
                return {"level": m, "j": j, "pair": w}
    return None


def is_levelwise_uniform(fam: RelFamily) -> bool:
    return levelwise_uniform_witness(fam) is None


def is_uniform_family(fam: RelFamily) -> bool:
    """Coherent and levelwise uniform: the families in bijection with
    uniform admissible relations on X_N."""
    return is_coherent(fam) and is_levelwise_uniform(fam)
