"""Partial isomorphisms of a finite structure.

A partial isomorphism is an isomorphism between two induced substructures.
The collection of all of them is a groupoid under composition; the
"nonidentity" subset (maps that are not restrictions of the identity) is
what downstream machinery uses as a generating set, so enumeration pairs
every member with its inverse and fixes a canonical order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CapExceeded, UnknownElement
from .structures import Structure


@dataclass(frozen=True)
class PartialIso:
    """An injective partial map on a structure's domain, stored as a graph
    sorted by source position."""

    base: Structure
    pairs: tuple[tuple[str, str], ...]

    @staticmethod
    def make(base: Structure, mapping) -> "PartialIso":
        mapping = dict(mapping)
        for k, v in mapping.items():
            if k not in base or v not in base:
                raise UnknownElement(f"{k}->{v}")
        if len(set(mapping.values())) != len(mapping):
            raise ValueError("partial isomorphism must be injective")
        pairs = tuple(sorted(mapping.items(), key=lambda kv: base.index(kv[0])))
        return PartialIso(base, pairs)

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    @property
    def dom(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.pairs)

    @property
    def rng(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.pairs)

    def apply(self, element: str) -> str | None:
        return self.as_dict().get(element)

    def is_identity_restriction(self) -> bool:
        return all(k == v for k, v in self.pairs)

    def sort_key(self) -> tuple:
        idx = self.base.index
        return (len(self.pairs), tuple((idx(a), idx(b)) for a, b in self.pairs))


def is_partial_iso(c: Structure, mapping) -> bool:
    """True when the map is injective and both preserves and reflects every
    relation on its domain/range."""
    mapping = dict(mapping)
    for k, v in mapping.items():
        if k not in c or v not in c:
            return False
    if len(set(mapping.values())) != len(mapping):
        return False
    dom = set(mapping)
    rng = set(mapping.values())
    inverse = {v: k for k, v in mapping.items()}
    for name, rows in c.tables:
        for row in rows:
            if all(e in dom for e in row):
                if tuple(mapping[e] for e in row) not in rows:
                    return False
            if all(e in rng for e in row):
                if tuple(inverse[e] for e in row) not in rows:
                    return False
    return True


def invert_partial(p: PartialIso) -> PartialIso:
    return PartialIso.make(p.base, {v: k for k, v in p.pairs})


def compose_partial(p: PartialIso, q: PartialIso) -> PartialIso:
    """p after q, restricted to where the composite is defined."""
    if p.base != q.base:
        raise ValueError("composition needs a common base structure")
    pd = p.as_dict()
    graph = {a: pd[b] for a, b in q.pairs if b in pd}
    return PartialIso.make(p.base, graph)


@dataclass(frozen=True)
class PartialIsoSet:
    """An inverse-closed, canonically ordered set of partial isomorphisms.

    Member i is named "p{i}"; `inverse_index[i]` locates its inverse (which
    may be i itself for involutions such as two-point swaps).
    """

    base: Structure
    members: tuple[PartialIso, ...]
    inverse_index: tuple[int, ...]
    nonidentity: bool

    def __len__(self) -> int:
        return len(self.members)

    def name(self, i: int) -> str:
        return f"p{i}"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.name(i) for i in range(len(self.members)))

    def representatives(self) -> tuple[int, ...]:
        """One index per {p, p^-1} pair (the smaller index; involutions are
        their own representative)."""
        return tuple(i for i in range(len(self.members)) if i <= self.inverse_index[i])

    def is_involution(self, i: int) -> bool:
        return self.inverse_index[i] == i

    def index_of(self, p: PartialIso) -> int:
        return self.members.index(p)


def enumerate_partial_isos(c: Structure, max_dom: int | None = None,
                           nonidentity: bool = False,
                           max_members: int = 10**6) -> PartialIsoSet:
    """All partial isomorphisms with |dom| <= max_dom, inverse-closed, in the
    canonical (|dom|, graph) order.

    With `nonidentity`, restrictions of the identity (including the empty
    map) are dropped.
    """
    n = len(c.domain)
    if max_dom is None:
        max_dom = n
    found: list[PartialIso] = []
    for k in range(0, min(max_dom, n) + 1):
        for dom_idx in itertools.combinations(range(n), k):
            dom = tuple(c.domain[i] for i in dom_idx)
            for rng_idx in itertools.permutations(range(n), k):
                mapping = {dom[j]: c.domain[rng_idx[j]] for j in range(k)}
                if nonidentity and all(a == b for a, b in mapping.items()):
                    continue
                if is_partial_iso(c, mapping):
                    found.append(PartialIso.make(c, mapping))
                    if len(found) > max_members:
                        raise CapExceeded(
                            f"more than {max_members} partial isomorphisms")
    found.sort(key=lambda p: p.sort_key())
    graph_pos = {p.pairs: i for i, p in enumerate(found)}
    inverse_index = []
    for p in found:
        q = invert_partial(p)
        if q.pairs not in graph_pos:
            raise AssertionError("enumeration must be inverse-closed")
        inverse_index.append(graph_pos[q.pairs])
    return PartialIsoSet(c, tuple(found), tuple(inverse_index), nonidentity)
