"""Reduced words over a generating set, small permutation groups, and
finite quotients.

Composition conventions (fixed once, used everywhere):

* permutations compose apply-rightmost-first, (s*t)(x) = s(t(x)),
* a word w = l1 l2 ... lm evaluates right to left, so the leftmost letter
  acts last; quotient images therefore multiply in word order,
* membership of a word in a point stabilizer is decided on the word's
  REDUCED form.

Generating sets coming from partial isomorphisms are inverse-closed and may
contain involutions (maps equal to their own inverse).  The group generated
is then a free product of copies of Z and Z/2; reduction normalizes an
inverse letter to its partner generator and cancels adjacent mutually
inverse letters, which yields the standard normal form for such products.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CapExceeded
from .partial_iso import PartialIsoSet


class Perm:
    """A permutation of {0,...,n-1} in one-line notation."""

    __slots__ = ("images",)

    def __init__(self, images):
        self.images = tuple(images)

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(range(n))

    @staticmethod
    def from_cycle(cycle, n: int) -> "Perm":
        images = list(range(n))
        cycle = list(cycle)
        for i, x in enumerate(cycle):
            images[x] = cycle[(i + 1) % len(cycle)]
        return Perm(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(self.images[j] for j in other.images)

    def inv(self) -> "Perm":
        out = [0] * len(self.images)
        for i, j in enumerate(self.images):
            out[j] = i
        return Perm(out)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: "Perm") -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"Perm{self.images}"


@dataclass(frozen=True)
class PermGroup:
    """A small permutation group with its elements materialized."""

    carrier: tuple[str, ...]
    generators: tuple[Perm, ...]
    elements: tuple[Perm, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Perm) -> bool:
        return p in set(self.elements)


DEFAULT_CLOSURE_CAP = 20000


def close_group(gens, carrier=None, cap: int = DEFAULT_CLOSURE_CAP) -> PermGroup:
    """Breadth-first closure of the generated group; raises CapExceeded."""
    gens = tuple(gens)
    degree = gens[0].degree if gens else (len(carrier) if carrier else 0)
    for g in gens:
        if g.degree != degree:
            raise ValueError("generators must share a carrier")
    if carrier is None:
        carrier = tuple(str(i) for i in range(degree))
    if len(carrier) != degree and gens:
        raise ValueError("carrier size must match generator degree")
    ident = Perm.identity(degree)
    seen = {ident}
    frontier = [ident]
    step = list(gens) + [g.inv() for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in step:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise CapExceeded(f"group closure exceeded cap {cap}")
                    nxt.append(y)
        frontier = nxt
    return PermGroup(tuple(carrier), gens, tuple(sorted(seen)))


def orbit(group: PermGroup, point) -> tuple:
    """Orbit of a carrier point (or index) under the group, as sorted labels."""
    if isinstance(point, str):
        start = group.carrier.index(point)
        as_label = True
    else:
        start = int(point)
        as_label = False
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for g in group.generators:
                for y in (g(x), g.inv()(x)):
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
        frontier = nxt
    idxs = sorted(seen)
    if as_label:
        return tuple(group.carrier[i] for i in idxs)
    return tuple(idxs)


# -- words ------------------------------------------------------------------

Letter = tuple[int, int]
Word = tuple[Letter, ...]

EMPTY_WORD: Word = ()


@dataclass(frozen=True)
class WordContext:
    """Naming and inverse-pairing for a generating set.

    `inverse[i]` is the index of generator i's formal inverse when that
    inverse is itself a listed generator (always the case for partial-iso
    sets), or None for abstract free generators whose inverse is only
    expressible with a -1 sign.
    """

    names: tuple[str, ...]
    inverse: tuple[int | None, ...]
    _pos: dict = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {n: i for i, n in enumerate(self.names)})
        if len(self._pos) != len(self.names):
            raise ValueError("generator names must be unique")

    @staticmethod
    def free(names) -> "WordContext":
        names = tuple(names)
        return WordContext(names, (None,) * len(names))

    @staticmethod
    def for_partial_isos(ps: PartialIsoSet) -> "WordContext":
        return WordContext(ps.names, tuple(ps.inverse_index))

    def _normalize(self, letter: Letter) -> Letter:
        i, s = letter
        if s not in (1, -1):
            raise ValueError(f"letter sign must be +-1, got {s}")
        if s == -1 and self.inverse[i] is not None:
            return (self.inverse[i], 1)
        return (i, s)

    def _inverse_letter(self, letter: Letter) -> Letter:
        i, s = letter
        return self._normalize((i, -s))

    def reduce(self, letters) -> Word:
        stack: list[Letter] = []
        for raw in letters:
            letter = self._normalize(tuple(raw))
            if stack and stack[-1] == self._inverse_letter(letter):
                stack.pop()
            else:
                stack.append(letter)
        return tuple(stack)

    def mul(self, *words: Word) -> Word:
        return self.reduce(itertools.chain.from_iterable(words))

    def inv(self, word: Word) -> Word:
        return self.reduce(self._inverse_letter(l) for l in reversed(word))

    def letter(self, name: str, sign: int = 1) -> Word:
        return self.reduce([(self._pos[name], sign)])

    def parse(self, text: str) -> Word:
        letters = []
        for token in text.split():
            if token.endswith("^-1"):
                name, sign = token[:-3], -1
            else:
                name, sign = token, 1
            if name not in self._pos:
                raise ValueError(f"unknown generator {name!r}")
            letters.append((self._pos[name], sign))
        return self.reduce(letters)

    def format(self, word: Word) -> str:
        return " ".join(
            self.names[i] if s == 1 else f"{self.names[i]}^-1" for i, s in word
        )


def eval_partial_word(word: Word, start: str, ps: PartialIsoSet) -> str | None:
    """Evaluate a reduced word at a point, right to left; None when any step
    is undefined."""
    ctx = WordContext.for_partial_isos(ps)
    word = ctx.reduce(word)
    current = start
    for i, sign in reversed(word):
        member = ps.members[i] if sign == 1 else ps.members[ps.inverse_index[i]]
        current = member.apply(current)
        if current is None:
            return None
    return current


def stabilizer_generators(c, ps: PartialIsoSet, a_i: str) -> list[Word]:
    """Generators for the words whose partial evaluation fixes a_i.

    Builds the labeled graph with an edge a ->(p) p(a) per member p, takes a
    breadth-first spanning tree of a_i's component, and emits one loop word
    per non-tree edge (tree path out, the edge, tree path back).  Words that
    reduce to the identity (reverse tree edges) are dropped.
    """
    ctx = WordContext.for_partial_isos(ps)
    if a_i not in c:
        raise ValueError(f"{a_i} not in the structure")

    parent_word: dict[str, Word] = {a_i: EMPTY_WORD}
    order = [a_i]
    frontier = [a_i]
    tree_edges: set[tuple[str, int, str]] = set()
    while frontier:
        nxt = []
        for u in frontier:
            for i, member in enumerate(ps.members):
                v = member.apply(u)
                if v is not None and v not in parent_word:
                    parent_word[v] = ctx.mul(ctx.letter(ps.name(i)), parent_word[u])
                    tree_edges.add((u, i, v))
                    order.append(v)
                    nxt.append(v)
        frontier = nxt

    out: list[Word] = []
    seen_words = set()
    for u in order:
        for i, member in enumerate(ps.members):
            v = member.apply(u)
            if v is None or v not in parent_word:
                continue
            if (u, i, v) in tree_edges:
                continue
            word = ctx.mul(ctx.inv(parent_word[v]), ctx.letter(ps.name(i)), parent_word[u])
            if word and word not in seen_words:
                seen_words.add(word)
                out.append(word)
    return out


# -- finite quotients -------------------------------------------------------

@dataclass(frozen=True)
class FiniteQuotient:
    """Images of the generators in a finite symmetric group.

    The kernel of the induced map on words realizes a finite-index normal
    subgroup.  Images may be given for any subset of generators that covers
    one of each inverse pair; the rest are derived, and mutual inverses are
    validated.
    """

    degree: int
    images: tuple[tuple[str, Perm], ...]
    _map: dict = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.images))
        for name, p in self.images:
            if p.degree != self.degree:
                raise ValueError(f"image of {name} has wrong degree")

    @staticmethod
    def make(degree: int, images: dict) -> "FiniteQuotient":
        return FiniteQuotient(degree, tuple(sorted(images.items())))

    def image(self, name: str) -> Perm:
        try:
            return self._map[name]
        except KeyError:
            raise KeyError(f"no image for generator {name}") from None

    def has_image(self, name: str) -> bool:
        return name in self._map

    def completed(self, ctx: WordContext) -> "FiniteQuotient":
        """Fill in images of paired inverses; check consistency."""
        images = dict(self._map)
        for i, name in enumerate(ctx.names):
            j = ctx.inverse[i]
            if j is None:
                continue
            partner = ctx.names[j]
            if name in images and partner in images:
                if images[partner] != images[name].inv():
                    raise ValueError(
                        f"images of {name} and {partner} are not mutually inverse")
            elif name in images:
                images[partner] = images[name].inv()
        missing = [n for n in ctx.names if n not in images]
        if missing:
            raise ValueError(f"no image for generators {missing}")
        return FiniteQuotient.make(self.degree, images)


def quotient_image(word: Word, q: FiniteQuotient, ctx: WordContext) -> Perm:
    """Product of generator images in word order (rightmost applied first)."""
    result = Perm.identity(q.degree)
    for i, sign in word:
        p = q.image(ctx.names[i])
        result = result * (p if sign == 1 else p.inv())
    return result


def subgroup_image(gens: list[Word], q: FiniteQuotient, ctx: WordContext,
                   cap: int = DEFAULT_CLOSURE_CAP) -> PermGroup:
    perms = tuple(quotient_image(w, q, ctx) for w in gens)
    if not perms:
        perms = ()
    carrier = tuple(str(i) for i in range(q.degree))
    if perms:
        return close_group(perms, carrier=carrier, cap=cap)
    return PermGroup(carrier, (), (Perm.identity(q.degree),))
