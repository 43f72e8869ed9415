"""Binary relations on carriers and the image operations between them.

A relation is a set of ordered pairs of element ids over a single carrier.
Admissible means it contains the bottom pair; in finite posets chain-closure
is automatic, so that one condition is the whole obligation.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import InadmissibleRelation, TypeMismatch
from .poset import FinPoset, MonotoneMap

__all__ = [
    "BinRel",
    "rel_from_pairs",
    "diagonal",
    "total_rel",
    "bottom_rel",
    "is_admissible",
    "require_admissible",
    "inverse_image",
    "direct_image",
    "intersect",
    "is_rel_morphism",
    "rel_morphism_witness",
]


class BinRel:
    """A binary relation on one carrier poset."""

    __slots__ = ("carrier", "pairs", "_matrix", "_hash", "__dict__")

    def __init__(self, carrier: FinPoset, pairs: frozenset):
        self.carrier = carrier
        self.pairs = pairs
        self._matrix = None
        self._hash = None

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            m = np.zeros((self.carrier.n, self.carrier.n), dtype=bool)
            for i, j in self.pairs:
                m[i, j] = True
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __le__(self, other: "BinRel") -> bool:
        if self.carrier != other.carrier:
            raise TypeMismatch("relation inclusion needs a shared carrier")
        return self.pairs <= other.pairs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinRel)
            and self.carrier == other.carrier
            and self.pairs == other.pairs
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.carrier, self.pairs))
        return self._hash

    def __repr__(self) -> str:
        return f"BinRel({len(self.pairs)} pairs on {self.carrier.n} elements)"


def rel_from_pairs(
    carrier: FinPoset, pairs: Iterable[tuple[int, int]], require: bool = False
) -> BinRel:
    ps = frozenset((int(a), int(b)) for a, b in pairs)
    for a, b in ps:
        if not (0 <= a < carrier.n and 0 <= b < carrier.n):
            raise TypeMismatch("relation pair out of range", pair=(a, b), size=carrier.n)
    rel = BinRel(carrier, ps)
    if require:
        require_admissible(rel, "rel_from_pairs")
    return rel


def diagonal(carrier: FinPoset) -> BinRel:
    return BinRel(carrier, frozenset((i, i) for i in range(carrier.n)))


def total_rel(carrier: FinPoset) -> BinRel:
    return BinRel(
        carrier, frozenset((i, j) for i in range(carrier.n) for j in range(carrier.n))
    )


def bottom_rel(carrier: FinPoset) -> BinRel:
    """The least admissible relation: just the bottom pair."""
    return BinRel(carrier, frozenset({(carrier.bottom, carrier.bottom)}))


def is_admissible(rel: BinRel) -> bool:
    b = rel.carrier.bottom
    return (b, b) in rel.pairs


def require_admissible(rel: BinRel, context: str) -> BinRel:
    if not is_admissible(rel):
        raise InadmissibleRelation(
            f"{context}: relation lacks the bottom pair", carrier=rel.carrier.n
        )
    return rel


def inverse_image(f: MonotoneMap, s: BinRel) -> BinRel:
    """f*S = all pairs whose images land in S.

    Preserves admissibility whenever S is admissible and f maps bottom to
    bottom; call sites that need admissibility must check it.
    """
    if s.carrier != f.cod:
        raise TypeMismatch("inverse image: relation lives on the codomain")
    t = f.table
    sm = s.matrix
    n = f.dom.n
    pairs = frozenset((i, j) for i in range(n) for j in range(n) if sm[t[i], t[j]])
    return BinRel(f.dom, pairs)


def direct_image(f: MonotoneMap, r: BinRel) -> BinRel:
    """f_!R = the pointwise image of R, with the bottom pair added back."""
    if r.carrier != f.dom:
        raise TypeMismatch("direct image: relation lives on the domain")
    t = f.table
    b = f.cod.bottom
    pairs = frozenset((t[i], t[j]) for i, j in r.pairs) | {(b, b)}
    return BinRel(f.cod, pairs)


def intersect(rels: Iterable[BinRel], carrier: FinPoset) -> BinRel:
    """Intersection of a family; the empty family yields the total relation."""
    rels = list(rels)
    if not rels:
        return total_rel(carrier)
    pairs = rels[0].pairs
    for r in rels[1:]:
        if r.carrier != carrier:
            raise TypeMismatch("intersection needs a shared carrier")
        pairs = pairs & r.pairs
    if rels[0].carrier != carrier:
        raise TypeMismatch("intersection needs a shared carrier")
    return BinRel(carrier, pairs)


def rel_morphism_witness(f: MonotoneMap, r: BinRel, s: BinRel):
    """A pair of R not carried into S by f, or None if f : R -> S."""
    if r.carrier != f.dom or s.carrier != f.cod:
        raise TypeMismatch("relation morphism: carriers must match dom/cod")
    t = f.table
    sm = s.matrix
    for i, j in r.pairs:
        if not sm[t[i], t[j]]:
            return (i, j)
    return None


def is_rel_morphism(f: MonotoneMap, r: BinRel, s: BinRel) -> bool:
    return rel_morphism_witness(f, r, s) is None
