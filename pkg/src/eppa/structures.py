"""Finite relational structures and their basic operations.

Conventions used throughout the package:

* a signature is a finite list of relation symbols with arities >= 1,
  kept sorted by symbol name; that sorted order is canonical and drives
  every iteration,
* a structure's domain is an ordered tuple of string ids; the listed
  order is canonical,
* relation tables are sets of tuples of element ids,
* a homomorphism preserves relations forward; an embedding is injective
  and also reflects them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import SignatureMismatch, UnknownElement


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities, sorted by name."""

    symbols: tuple[tuple[str, int], ...]

    @staticmethod
    def of(spec) -> "Signature":
        """Build from a mapping name->arity or an iterable of (name, arity)."""
        pairs = sorted(spec.items()) if hasattr(spec, "items") else sorted(spec)
        names = [n for n, _ in pairs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation symbol names")
        for name, arity in pairs:
            if not isinstance(name, str) or not name:
                raise ValueError(f"bad relation symbol name: {name!r}")
            if not isinstance(arity, int) or arity < 1:
                raise ValueError(f"arity of {name} must be a positive integer")
        return Signature(tuple((n, a) for n, a in pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, a in self.symbols:
            if n == name:
                return a
        raise KeyError(name)

    def as_dict(self) -> dict[str, int]:
        return dict(self.symbols)


@dataclass(frozen=True)
class Structure:
    """A finite relational structure over a Signature."""

    sig: Signature
    domain: tuple[str, ...]
    tables: tuple[tuple[str, frozenset[tuple[str, ...]]], ...]
    _index: dict = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(self.domain)})
        if len(self._index) != len(self.domain):
            raise ValueError("duplicate ids in domain")
        table_names = tuple(n for n, _ in self.tables)
        if table_names != self.sig.names:
            raise ValueError("tables must be aligned with the signature")
        for name, rows in self.tables:
            a = self.sig.arity(name)
            for row in rows:
                if len(row) != a:
                    raise ValueError(f"tuple {row} has wrong arity for {name}")
                for e in row:
                    if e not in self._index:
                        raise UnknownElement(f"{e} in a {name}-tuple is not in the domain")

    @staticmethod
    def make(sig, domain, relations=None) -> "Structure":
        """Build a structure; `relations` maps symbol name -> iterable of tuples."""
        if not isinstance(sig, Signature):
            sig = Signature.of(sig)
        relations = relations or {}
        unknown = set(relations) - set(sig.names)
        if unknown:
            raise ValueError(f"relations for unknown symbols: {sorted(unknown)}")
        tables = tuple(
            (name, frozenset(tuple(row) for row in relations.get(name, ())))
            for name in sig.names
        )
        return Structure(sig, tuple(domain), tables)

    def rel(self, name: str) -> frozenset[tuple[str, ...]]:
        for n, rows in self.tables:
            if n == name:
                return rows
        raise KeyError(name)

    def index(self, element: str) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise UnknownElement(element) from None

    def __contains__(self, element: str) -> bool:
        return element in self._index

    def __len__(self) -> int:
        return len(self.domain)

    def sorted_rows(self, name: str) -> list[tuple[str, ...]]:
        """Rows of a table in canonical (domain-index lexicographic) order."""
        return sorted(self.rel(name), key=lambda t: tuple(self._index[e] for e in t))

    def relations_dict(self) -> dict[str, frozenset[tuple[str, ...]]]:
        return dict(self.tables)


@dataclass(frozen=True)
class StructureMap:
    """A total map between the domains of two structures."""

    source: Structure
    target: Structure
    graph: tuple[tuple[str, str], ...]

    @staticmethod
    def make(source: Structure, target: Structure, mapping) -> "StructureMap":
        mapping = dict(mapping)
        if set(mapping) != set(source.domain):
            raise ValueError("map must be total on the source domain")
        for v in mapping.values():
            if v not in target:
                raise UnknownElement(v)
        graph = tuple(sorted(mapping.items(), key=lambda kv: source.index(kv[0])))
        return StructureMap(source, target, graph)

    def as_dict(self) -> dict[str, str]:
        return dict(self.graph)

    def apply(self, element: str) -> str:
        return self.as_dict()[element]

    def is_homomorphism(self) -> bool:
        m = self.as_dict()
        for name, rows in self.source.tables:
            tgt = self.target.rel(name)
            for row in rows:
                if tuple(m[e] for e in row) not in tgt:
                    return False
        return True

    def is_embedding(self) -> bool:
        m = self.as_dict()
        if len(set(m.values())) != len(m):
            return False
        if not self.is_homomorphism():
            return False
        image = set(m.values())
        inverse = {v: k for k, v in m.items()}
        for name, _ in self.source.tables:
            src = self.source.rel(name)
            for row in self.target.rel(name):
                if all(e in image for e in row):
                    if tuple(inverse[e] for e in row) not in src:
                        return False
        return True


@dataclass(frozen=True)
class Factorization:
    """Partition of a structure into singleton-exchange classes.

    Two elements share a class exactly when the one-point map between them
    is a partial isomorphism, i.e. they satisfy the same constant tuples
    R(a,...,a) for every symbol R. Each class carries its canonically least
    element as representative.
    """

    base: Structure
    classes: tuple[tuple[tuple[str, ...], str], ...]

    @property
    def representatives(self) -> tuple[str, ...]:
        return tuple(rep for _, rep in self.classes)

    def class_of(self, element: str) -> int:
        for i, (members, _) in enumerate(self.classes):
            if element in members:
                return i
        raise UnknownElement(element)


@dataclass(frozen=True)
class Finding:
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]
    notes: tuple[Finding, ...]

    @property
    def valid(self) -> bool:
        return not self.findings


def validate_structure(raw) -> ValidationReport:
    """Check raw structure data and report problems instead of raising.

    Accepts either a parsed JSON object ({"signature": .., "domain": ..,
    "relations": ..}) or an already-built Structure. Errors make the report
    invalid; notes flag oddities that are still legal (currently: domains on
    which the singleton-exchange partition differs from the
    unary-predicates-only partition).
    """
    findings: list[Finding] = []
    notes: list[Finding] = []
    if isinstance(raw, Structure):
        notes.extend(_factorization_notes(raw))
        return ValidationReport(tuple(findings), tuple(notes))

    sig_raw = raw.get("signature", {})
    domain = list(raw.get("domain", []))
    relations = raw.get("relations", {})

    arities: dict[str, int] = {}
    for name, arity in (sig_raw.items() if hasattr(sig_raw, "items") else sig_raw):
        if name in arities:
            findings.append(Finding("duplicate-symbol", name))
        elif not isinstance(arity, int) or arity < 1:
            findings.append(Finding("bad-arity", f"{name}: {arity!r}"))
        else:
            arities[name] = arity

    seen = set()
    for e in domain:
        if e in seen:
            findings.append(Finding("duplicate-id", str(e)))
        seen.add(e)

    for name in sorted(relations):
        rows = relations[name]
        if name not in arities:
            findings.append(Finding("unknown-symbol", name))
            continue
        seen_rows = set()
        for row in rows:
            row = tuple(row)
            if len(row) != arities[name]:
                findings.append(Finding("arity-mismatch", f"{name}{row}"))
                continue
            bad = [e for e in row if e not in seen]
            if bad:
                findings.append(Finding("unknown-id", f"{name}{row}: {bad[0]}"))
                continue
            if row in seen_rows:
                findings.append(Finding("duplicate-tuple", f"{name}{row}"))
            seen_rows.add(row)

    if not findings:
        sig = Signature.of(arities)
        s = Structure.make(sig, domain, {n: set(map(tuple, r)) for n, r in relations.items()})
        notes.extend(_factorization_notes(s))
    return ValidationReport(tuple(findings), tuple(notes))


def _factorization_notes(s: Structure) -> list[Finding]:
    full = natural_factorization(s)
    unary = _unary_only_partition(s)
    full_sets = {frozenset(members) for members, _ in full.classes}
    if full_sets != unary:
        return [
            Finding(
                "factorization-divergence",
                "singleton-exchange classes differ from unary-predicate classes",
            )
        ]
    return []


def _unary_only_partition(s: Structure) -> set[frozenset[str]]:
    unary_names = [n for n, a in s.sig.symbols if a == 1]
    buckets: dict[tuple[bool, ...], list[str]] = {}
    for e in s.domain:
        key = tuple((e,) in s.rel(n) for n in unary_names)
        buckets.setdefault(key, []).append(e)
    return {frozenset(v) for v in buckets.values()}


def induced_substructure(s: Structure, elements) -> Structure:
    """Substructure on the given element set, keeping s's domain order."""
    wanted = set(elements)
    for e in wanted:
        if e not in s:
            raise UnknownElement(e)
    domain = tuple(e for e in s.domain if e in wanted)
    relations = {
        name: {row for row in rows if all(e in wanted for e in row)}
        for name, rows in s.tables
    }
    return Structure.make(s.sig, domain, relations)


def extends(big: Structure, small: Structure) -> bool:
    """True when `small` is an induced substructure of `big` (same ids)."""
    if big.sig != small.sig:
        return False
    if not set(small.domain) <= set(big.domain):
        return False
    ind = induced_substructure(big, small.domain)
    return ind.relations_dict() == small.relations_dict()


def _hom_constraints(a: Structure):
    """For each position j, the relation tuples (as index tuples) whose last
    newly-assigned element is j; checking these right after assigning j gives
    full forward propagation."""
    by_last: list[list[tuple[str, tuple[int, ...]]]] = [[] for _ in a.domain]
    for name, rows in a.tables:
        for row in rows:
            idx = tuple(a.index(e) for e in row)
            if idx:
                by_last[max(idx)].append((name, idx))
    return by_last


def find_homomorphism(a: Structure, b: Structure) -> StructureMap | None:
    """Lexicographically least homomorphism a -> b, or None.

    Elements of `a` are assigned in canonical domain order, candidate images
    scanned in b's canonical order, so the first complete assignment found is
    the least one.
    """
    if a.sig != b.sig:
        raise SignatureMismatch("homomorphism search needs a shared signature")
    n, m = len(a.domain), len(b.domain)
    if n == 0:
        return StructureMap.make(a, b, {})
    if m == 0:
        return None
    constraints = _hom_constraints(a)
    b_tables = {name: frozenset(tuple(b.index(e) for e in row) for row in rows)
                for name, rows in b.tables}
    img = [-1] * n

    def ok(j: int) -> bool:
        for name, idx in constraints[j]:
            if tuple(img[i] for i in idx) not in b_tables[name]:
                return False
        return True

    j = 0
    img[0] = 0
    while True:
        if ok(j):
            if j == n - 1:
                mapping = {a.domain[i]: b.domain[img[i]] for i in range(n)}
                return StructureMap.make(a, b, mapping)
            j += 1
            img[j] = 0
            continue
        while img[j] == m - 1:
            img[j] = -1
            j -= 1
            if j < 0:
                return None
        img[j] += 1


def is_T_free(s: Structure, forbidden) -> tuple[bool, StructureMap | None]:
    """No structure in `forbidden` maps homomorphically into s.

    Returns (True, None) or (False, witness homomorphism) for the first
    pattern in list order that embeds homomorphically.
    """
    for t in forbidden:
        w = find_homomorphism(t, s)
        if w is not None:
            return False, w
    return True, None


def is_gaifman_clique(t: Structure) -> bool:
    """Every unordered pair of distinct elements co-occurs in some related
    tuple of arity >= 2."""
    n = len(t.domain)
    if n <= 1:
        return True
    covered: set[frozenset[str]] = set()
    for name, rows in t.tables:
        if t.sig.arity(name) < 2:
            continue
        for row in rows:
            distinct = set(row)
            for x, y in itertools.combinations(sorted(distinct), 2):
                covered.add(frozenset((x, y)))
    for x, y in itertools.combinations(t.domain, 2):
        if frozenset((x, y)) not in covered:
            return False
    return True


@dataclass(frozen=True)
class Amalgam:
    structure: Structure
    into1: StructureMap
    into2: StructureMap


def _fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name = name + "#2"
    return name


def free_amalgamation(c1: Structure, c2: Structure, over: Structure,
                      emb1: StructureMap | None = None,
                      emb2: StructureMap | None = None) -> Amalgam:
    """Glue c1 and c2 along embedded copies of `over`; tables are unioned.

    Defaults to identity embeddings (over's ids are present in both).
    Elements of c2 outside the glued part are renamed with a deterministic
    "#2" suffix when they would collide with ids from c1.
    """
    if not (c1.sig == c2.sig == over.sig):
        raise SignatureMismatch("amalgamation needs one shared signature")
    if emb1 is None:
        emb1 = StructureMap.make(over, c1, {e: e for e in over.domain})
    if emb2 is None:
        emb2 = StructureMap.make(over, c2, {e: e for e in over.domain})
    if not (emb1.source == over and emb1.target == c1 and emb1.is_embedding()):
        raise ValueError("emb1 is not an embedding of the shared part into c1")
    if not (emb2.source == over and emb2.target == c2 and emb2.is_embedding()):
        raise ValueError("emb2 is not an embedding of the shared part into c2")

    glue = {emb2.apply(e): emb1.apply(e) for e in over.domain}
    taken = set(c1.domain)
    rename: dict[str, str] = {}
    for e in c2.domain:
        if e in glue:
            rename[e] = glue[e]
        else:
            fresh = _fresh_name(e, taken)
            rename[e] = fresh
            taken.add(fresh)

    domain = tuple(c1.domain) + tuple(rename[e] for e in c2.domain if e not in glue)
    relations = {}
    for name, rows in c1.tables:
        merged = set(rows)
        for row in c2.rel(name):
            merged.add(tuple(rename[e] for e in row))
        relations[name] = merged
    amalgam = Structure.make(c1.sig, domain, relations)
    into1 = StructureMap.make(c1, amalgam, {e: e for e in c1.domain})
    into2 = StructureMap.make(c2, amalgam, rename)
    return Amalgam(amalgam, into1, into2)


def natural_factorization(c: Structure) -> Factorization:
    """Partition c by equality of all constant tuples, least element as rep."""
    sig_constants = [(name, a) for name, a in c.sig.symbols]

    def constant_profile(e: str) -> tuple[bool, ...]:
        return tuple((e,) * a in c.rel(name) for name, a in sig_constants)

    buckets: dict[tuple[bool, ...], list[str]] = {}
    order: list[tuple[bool, ...]] = []
    for e in c.domain:
        key = constant_profile(e)
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(e)
    classes = tuple((tuple(buckets[k]), buckets[k][0]) for k in order)
    return Factorization(c, classes)
