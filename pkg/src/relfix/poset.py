"""Finite pointed posets and monotone maps.

Conventions
-----------
* Elements of a poset of size n are the ids 0..n-1.
* The order is a dense boolean matrix ``leq`` with ``leq[i, j]`` meaning
  i is below j.  The matrix is read-only.
* Every poset is pointed: it has a least element, and after canonicalization
  that element is id 0.
* Canonical form: elements are stably sorted by height (length of the longest
  chain below), which is a linear-extension rank.  Height is invariant under
  relabeling, so canonicalizing twice equals canonicalizing once.
* Each element carries a descriptor in ``elems`` (an id, a pair, an injection
  tag, or a map table) so that structural constructions can act on elements
  concretely.  Descriptors are metadata: equality of posets compares order
  structure only.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .errors import (
    NoLeastElement,
    NotAChain,
    NotAPartialOrder,
    NotMonotone,
    SizeCapExceeded,
    TypeMismatch,
)

__all__ = [
    "FinPoset",
    "MonotoneMap",
    "one",
    "chain_poset",
    "validate_poset",
    "canonicalize",
    "check_poset_axioms",
    "lift",
    "product",
    "sum_sep",
    "hom_poset",
    "enumerate_monotone_maps",
    "chain_limit",
    "monotone_map",
    "identity_map",
    "const_map",
    "bottom_map",
]


def _heights(leq: np.ndarray) -> np.ndarray:
    """Longest-chain height of each element, computed from a raw matrix."""
    n = leq.shape[0]
    down_sizes = leq.sum(axis=0)
    order = np.argsort(down_sizes, kind="stable")
    heights = np.zeros(n, dtype=np.int64)
    for i in order:
        below = np.flatnonzero(leq[:, i])
        below = below[below != i]
        if below.size:
            heights[i] = heights[below].max() + 1
    return heights


class FinPoset:
    """A finite pointed poset in canonical form.

    Do not call the constructor directly; use validate_poset or the
    construction functions, which canonicalize and check pointedness.
    """

    def __init__(self, leq: np.ndarray, bottom: int, elems: tuple, label: str | None = None):
        leq = np.asarray(leq, dtype=bool)
        leq.setflags(write=False)
        self.leq = leq
        self.n = leq.shape[0]
        self.bottom = bottom
        self.elems = elems
        self.label = label

    # -- identity ---------------------------------------------------------

    @cached_property
    def _key(self) -> tuple:
        return (self.n, self.bottom, self.leq.tobytes())

    def __eq__(self, other) -> bool:
        return isinstance(other, FinPoset) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        name = self.label or "poset"
        return f"<{name}: {self.n} elements>"

    # -- structure --------------------------------------------------------

    def le(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    @cached_property
    def heights(self) -> np.ndarray:
        h = _heights(self.leq)
        h.setflags(write=False)
        return h

    @cached_property
    def covers(self) -> np.ndarray:
        """covers[i, j] iff j covers i (i < j with nothing strictly between)."""
        lt = self.leq & ~np.eye(self.n, dtype=bool)
        between = (lt.astype(np.int32) @ lt.astype(np.int32)) > 0
        cov = lt & ~between
        cov.setflags(write=False)
        return cov

    @cached_property
    def elem_index(self) -> dict:
        idx = {d: i for i, d in enumerate(self.elems)}
        if len(idx) != self.n:
            raise TypeMismatch("duplicate element descriptors", label=self.label)
        return idx

    def to_dot(self, name: str = "poset") -> str:
        """Hasse diagram in DOT format: nodes plus covering edges only."""
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i in range(self.n):
            text = _short_descriptor(self.elems[i]).replace('"', r"\"")
            lines.append(f'  {i} [label="{text}"];')
        cov = self.covers
        for i in range(self.n):
            for j in np.flatnonzero(cov[i]):
                lines.append(f"  {i} -> {int(j)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _short_descriptor(d) -> str:
    if isinstance(d, tuple) and len(d) == 2 and d[0] in ("up", "inl", "inr"):
        return f"{d[0]} {_short_descriptor(d[1])}"
    return str(d)


def _canonical_build(leq: np.ndarray, elems: tuple, label: str | None) -> FinPoset:
    """Relabel along the stable height sort and locate the bottom."""
    n = leq.shape[0]
    heights = _heights(leq)
    perm = np.argsort(heights, kind="stable")
    leq2 = np.ascontiguousarray(leq[np.ix_(perm, perm)])
    elems2 = tuple(elems[p] for p in perm)
    if not leq2[0].all():
        bad = int(np.flatnonzero(~leq2[0])[0])
        raise NoLeastElement(
            "no least element", candidate=elems2[0], not_above=elems2[bad]
        )
    return FinPoset(leq2, 0, elems2, label)


def canonicalize(p: FinPoset) -> FinPoset:
    """Recompute the canonical form (idempotent on constructed posets)."""
    return _canonical_build(p.leq, p.elems, p.label)


def check_poset_axioms(leq: np.ndarray) -> list[tuple[str, tuple]]:
    """All axiom violations of a raw matrix, as (axiom, witness) pairs."""
    out: list[tuple[str, tuple]] = []
    n = leq.shape[0]
    for i in range(n):
        if not leq[i, i]:
            out.append(("reflexivity", (i,)))
    both = leq & leq.T & ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero(both)):
        if i < j:
            out.append(("antisymmetry", (int(i), int(j))))
    closure = (leq.astype(np.int32) @ leq.astype(np.int32)) > 0
    missing = closure & ~leq
    for i, j in zip(*np.nonzero(missing)):
        out.append(("transitivity", (int(i), int(j))))
    return out


def validate_poset(
    n: int,
    le_pairs: Iterable[tuple[int, int]],
    bottom: int,
    label: str | None = None,
) -> FinPoset:
    """Build a poset from generating pairs, closing under transitivity.

    Raises NotAPartialOrder (with the offending pair) on cycles and
    NoLeastElement if ``bottom`` is not below every element.
    """
    if n <= 0:
        raise NotAPartialOrder("a poset needs at least one element", size=n)
    leq = np.eye(n, dtype=bool)
    for i, j in le_pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise NotAPartialOrder("pair out of range", pair=(i, j), size=n)
        leq[i, j] = True
    for k in range(n):  # Warshall closure
        leq |= np.outer(leq[:, k], leq[k, :])
    both = leq & leq.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise NotAPartialOrder("antisymmetry", axiom="antisymmetry", pair=(i, j))
    if not (0 <= bottom < n):
        raise NoLeastElement("bottom id out of range", bottom=bottom, size=n)
    if not leq[bottom].all():
        bad = int(np.flatnonzero(~leq[bottom])[0])
        raise NoLeastElement("claimed bottom is not least", bottom=bottom, not_above=bad)
    return _canonical_build(leq, tuple(range(n)), label)


def one(label: str = "one") -> FinPoset:
    return FinPoset(np.ones((1, 1), dtype=bool), 0, (0,), label)


def chain_poset(n: int, label: str | None = None) -> FinPoset:
    if n <= 0:
        raise NotAPartialOrder("a chain needs at least one element", size=n)
    leq = np.triu(np.ones((n, n), dtype=bool))
    return FinPoset(leq, 0, tuple(range(n)), label or f"chain({n})")


# ---------------------------------------------------------------------------
# monotone maps
# ---------------------------------------------------------------------------


class MonotoneMap:
    """A monotone map between finite posets, stored as a table of ids."""

    __slots__ = ("dom", "cod", "table", "_arr", "_hash")

    def __init__(self, dom: FinPoset, cod: FinPoset, table: tuple):
        self.dom = dom
        self.cod = cod
        self.table = tuple(int(v) for v in table)
        self._arr = None
        self._hash = None

    @property
    def arr(self) -> np.ndarray:
        if self._arr is None:
            a = np.array(self.table, dtype=np.int64)
            a.setflags(write=False)
            self._arr = a
        return self._arr

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __matmul__(self, other: "MonotoneMap") -> "MonotoneMap":
        """(f @ g)(x) = f(g(x))."""
        if other.cod != self.dom:
            raise TypeMismatch("composition domain mismatch")
        return MonotoneMap(other.dom, self.cod, tuple(self.table[v] for v in other.table))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonotoneMap)
            and self.table == other.table
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dom, self.cod, self.table))
        return self._hash

    def __repr__(self) -> str:
        return f"MonotoneMap({list(self.table)})"

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.table == tuple(range(self.dom.n))

    def pointwise_leq(self, other: "MonotoneMap") -> bool:
        if self.dom != other.dom or self.cod != other.cod:
            raise TypeMismatch("pointwise comparison needs equal dom/cod")
        return bool(self.cod.leq[self.arr, other.arr].all())

    def check(self) -> None:
        w = monotonicity_witness(self.dom, self.cod, self.arr)
        if w is not None:
            raise NotMonotone("table is not monotone", witness=w)


def monotonicity_witness(dom: FinPoset, cod: FinPoset, arr: np.ndarray):
    """A pair (i, j) with i <= j but arr[i] !<= arr[j], or None."""
    if arr.size != dom.n:
        return ("arity", arr.size)
    if arr.size and (arr.min() < 0 or arr.max() >= cod.n):
        return ("range", int(arr.max()))
    bad = dom.leq & ~cod.leq[np.ix_(arr, arr)]
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        return (i, j)
    return None


def monotone_map(dom: FinPoset, cod: FinPoset, table: Sequence[int]) -> MonotoneMap:
    m = MonotoneMap(dom, cod, tuple(table))
    m.check()
    return m


def identity_map(p: FinPoset) -> MonotoneMap:
    return MonotoneMap(p, p, tuple(range(p.n)))


def const_map(dom: FinPoset, cod: FinPoset, value: int) -> MonotoneMap:
    return MonotoneMap(dom, cod, (value,) * dom.n)


def bottom_map(dom: FinPoset, cod: FinPoset) -> MonotoneMap:
    return const_map(dom, cod, cod.bottom)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def _check_size(n: int, caps: Caps, what: str, **extra) -> None:
    if n > caps.max_elements:
        raise SizeCapExceeded(
            f"{what} would have {n} elements", size=n, cap=caps.max_elements, **extra
        )
    if n * n > caps.max_pairs:
        raise SizeCapExceeded(
            f"{what} order matrix would have {n * n} entries",
            size=n * n,
            cap=caps.max_pairs,
            **extra,
        )


def lift(x: FinPoset, caps: Caps = DEFAULT_CAPS) -> FinPoset:
    """One fresh bottom strictly below an embedded copy of x."""
    n = x.n + 1
    _check_size(n, caps, "lift")
    leq = np.zeros((n, n), dtype=bool)
    leq[0, :] = True
    leq[0, 0] = True
    leq[1:, 1:] = x.leq
    elems = ("bot",) + tuple(("up", d) for d in x.elems)
    return _canonical_build(leq, elems, None)


def product(x: FinPoset, y: FinPoset, caps: Caps = DEFAULT_CAPS) -> FinPoset:
    """Cartesian product with the componentwise order."""
    n = x.n * y.n
    _check_size(n, caps, "product")
    leq = np.kron(x.leq, y.leq)
    elems = tuple((dx, dy) for dx in x.elems for dy in y.elems)
    return _canonical_build(leq, elems, None)


def sum_sep(x: FinPoset, y: FinPoset, caps: Caps = DEFAULT_CAPS) -> FinPoset:
    """Separated sum: a fresh bottom below two incomparable injected copies."""
    n = 1 + x.n + y.n
    _check_size(n, caps, "separated sum")
    leq = np.zeros((n, n), dtype=bool)
    leq[0, :] = True
    leq[1 : 1 + x.n, 1 : 1 + x.n] = x.leq
    leq[1 + x.n :, 1 + x.n :] = y.leq
    elems = (
        ("bot",)
        + tuple(("inl", d) for d in x.elems)
        + tuple(("inr", d) for d in y.elems)
    )
    return _canonical_build(leq, elems, None)


def enumerate_monotone_maps(x: FinPoset, y: FinPoset, max_count: int | None = None):
    """Yield every monotone table x -> y as a tuple, in lexicographic order.

    Enumeration walks elements in canonical order (a linear extension), so a
    candidate value only has to sit above the images of already-assigned
    covers.  Aborts with SizeCapExceeded once more than max_count tables
    have been produced.
    """
    cover_preds = [list(map(int, np.flatnonzero(x.covers[:, i]))) for i in range(x.n)]
    table = [0] * x.n
    count = 0

    def rec(i: int):
        nonlocal count
        if i == x.n:
            count += 1
            if max_count is not None and count > max_count:
                raise SizeCapExceeded(
                    "monotone map enumeration exceeded cap",
                    cap=max_count,
                    dom=x.n,
                    cod=y.n,
                )
            yield tuple(table)
            return
        mask = np.ones(y.n, dtype=bool)
        for j in cover_preds[i]:
            mask &= y.leq[table[j]]
        for v in map(int, np.flatnonzero(mask)):
            table[i] = v
            yield from rec(i + 1)

    yield from rec(0)


def hom_poset(x: FinPoset, y: FinPoset, caps: Caps = DEFAULT_CAPS) -> FinPoset:
    """All monotone maps x -> y under the pointwise order.

    Elements are tagged with their map tables; the bottom is the constant
    bottom map.
    """
    tables = list(enumerate_monotone_maps(x, y, max_count=caps.max_elements))
    m = len(tables)
    _check_size(m, caps, "hom poset", dom=x.n, cod=y.n)
    arr = np.array(tables, dtype=np.int64)
    leq = y.leq[arr[:, None, :], arr[None, :, :]].all(axis=2)
    return _canonical_build(leq, tuple(tables), None)


def hom_element_map(h: FinPoset, x: FinPoset, y: FinPoset, i: int) -> MonotoneMap:
    """The monotone map x -> y represented by element i of hom_poset(x, y)."""
    return MonotoneMap(x, y, h.elems[i])


def chain_limit(seq, carrier: FinPoset | None = None):
    """Last value of an increasing sequence (its lub in a finite poset).

    Accepts a sequence of element ids (carrier required) or of MonotoneMap
    with shared dom/cod.  Raises NotAChain at the first non-increase.
    """
    seq = list(seq)
    if not seq:
        raise NotAChain("empty sequence has no limit", index=0)
    if isinstance(seq[0], MonotoneMap):
        for k in range(len(seq) - 1):
            f, g = seq[k], seq[k + 1]
            if f.dom != g.dom or f.cod != g.cod:
                raise TypeMismatch("chain of maps with shifting dom/cod", index=k)
            if not f.pointwise_leq(g):
                raise NotAChain("maps are not pointwise increasing", index=k)
        return seq[-1]
    if carrier is None:
        raise TypeMismatch("element chain needs an explicit carrier")
    for k in range(len(seq) - 1):
        if not carrier.le(seq[k], seq[k + 1]):
            raise NotAChain("sequence is not increasing", index=k, pair=(seq[k], seq[k + 1]))
    return seq[-1]
