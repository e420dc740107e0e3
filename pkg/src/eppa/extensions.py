"""Extensions of a structure by automorphisms assigned to its partial
isomorphisms (HL-extensions), their verification, canonical coset covers,
and coherence between nested extensions.

An HL-extension of C is a pair (D, phi) where D extends C and phi assigns
to every nonidentity partial isomorphism p of C an automorphism of D
extending p, with phi(p^-1) = phi(p)^-1.  The canonical covers built here
realize D-like structures as disjoint unions of coset spaces of the group
generated by the assigned automorphisms; every finite minimal extension is
a homomorphic image of such a cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (CapExceeded, CoverVerificationError, EmbeddingFailure,
                     InputError, SignatureMismatch)
from .groups import (DEFAULT_CLOSURE_CAP, EMPTY_WORD, FiniteQuotient, Perm,
                     PermGroup, WordContext, close_group, eval_partial_word,
                     quotient_image, stabilizer_generators)
from .partial_iso import PartialIsoSet, enumerate_partial_isos
from .structures import (Structure, StructureMap, extends, induced_substructure,
                         is_T_free, natural_factorization)


@dataclass(frozen=True)
class HLExtension:
    """Base structure, extension structure, and one automorphism per
    nonidentity partial isomorphism of the base (stored for all members of
    the inverse-closed set; permutations act on ext-domain indices)."""

    base: Structure
    ext: Structure
    ps: PartialIsoSet
    phi: tuple[Perm, ...]

    @staticmethod
    def build(base: Structure, ext: Structure, phi_by_member: dict[int, Perm],
              ps: PartialIsoSet | None = None) -> "HLExtension":
        """Complete a partial assignment: members missing an automorphism get
        the inverse of their partner's; both-given pairs are checked."""
        if ps is None:
            ps = enumerate_partial_isos(base, nonidentity=True)
        full: dict[int, Perm] = dict(phi_by_member)
        for i in range(len(ps.members)):
            j = ps.inverse_index[i]
            if i in full and j in full:
                if full[j] != full[i].inv():
                    raise InputError(
                        f"automorphisms for p{i} and p{j} are not mutually inverse")
            elif i in full:
                full[j] = full[i].inv()
        missing = [i for i in range(len(ps.members)) if i not in full]
        if missing:
            raise InputError(f"no automorphism assigned for members {missing}")
        return HLExtension(base, ext, ps, tuple(full[i] for i in range(len(ps.members))))

    def phi_of(self, member_index: int) -> Perm:
        return self.phi[member_index]

    def phi_as_map(self, member_index: int) -> dict[str, str]:
        p = self.phi[member_index]
        return {self.ext.domain[i]: self.ext.domain[p(i)]
                for i in range(len(self.ext.domain))}

    def generated_group(self, cap: int = DEFAULT_CLOSURE_CAP) -> PermGroup:
        if not self.phi:
            ident = Perm.identity(len(self.ext.domain))
            return PermGroup(self.ext.domain, (), (ident,))
        return close_group(self.phi, carrier=self.ext.domain, cap=cap)


def _is_automorphism(s: Structure, perm: Perm) -> bool:
    for _, rows in s.tables:
        for row in rows:
            image = tuple(s.domain[perm(s.index(e))] for e in row)
            if image not in rows:
                return False
    return True


@dataclass(frozen=True)
class VerifyReport:
    substructure: bool
    automorphisms: bool
    extension: bool
    involution: bool
    t_free: bool
    minimal: bool
    failures: tuple[str, ...]

    @property
    def valid(self) -> bool:
        """HL-extension validity plus T-freeness; minimality reported but not
        required (the definition does not demand it)."""
        return (self.substructure and self.automorphisms and self.extension
                and self.involution and self.t_free)

    def as_dict(self) -> dict:
        return {
            "substructure": self.substructure,
            "automorphisms": self.automorphisms,
            "extension": self.extension,
            "involution": self.involution,
            "t_free": self.t_free,
            "minimal": self.minimal,
            "valid": self.valid,
            "failures": list(self.failures),
        }


def verify_hl_extension(e: HLExtension, forbidden=()) -> VerifyReport:
    failures: list[str] = []

    sub = extends(e.ext, e.base)
    if not sub:
        failures.append("base is not an induced substructure of the extension")

    autos = True
    for i, perm in enumerate(e.phi):
        if perm.degree != len(e.ext.domain) or not _is_automorphism(e.ext, perm):
            autos = False
            failures.append(f"phi(p{i}) is not an automorphism of the extension")
            break

    extension = True
    for i, member in enumerate(e.ps.members):
        perm = e.phi[i]
        for a, b in member.pairs:
            if e.ext.domain[perm(e.ext.index(a))] != b:
                extension = False
                failures.append(f"phi(p{i}) does not extend p{i} at {a}")
                break
        if not extension:
            break

    involution = True
    for i in range(len(e.ps.members)):
        j = e.ps.inverse_index[i]
        if e.phi[j] != e.phi[i].inv():
            involution = False
            failures.append(f"phi(p{j}) is not the inverse of phi(p{i})")
            break

    tfree, witness = is_T_free(e.ext, forbidden)
    if not tfree:
        failures.append("extension admits a homomorphism from a forbidden pattern")

    minimal = is_minimal(e)
    return VerifyReport(sub, autos, extension, involution, tfree, minimal,
                        tuple(failures))


def _closure_points(e: HLExtension, seeds=None) -> set[int]:
    seen = {e.ext.index(a) for a in e.base.domain}
    if seeds is not None:
        seen |= {e.ext.index(a) for a in seeds}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for perm in e.phi:
                y = perm(x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def is_minimal(e: HLExtension) -> bool:
    """Every point of the extension is reachable from the base by applying
    assigned automorphisms."""
    return len(_closure_points(e)) == len(e.ext.domain)


# -- canonical coset covers ---------------------------------------------------


@dataclass(frozen=True)
class CosetClassInfo:
    class_index: int
    representative: str
    subgroup_order: int
    coset_count: int


@dataclass(frozen=True)
class CosetExtension:
    """A structure on disjoint coset spaces of a finite image group, with the
    base embedded, left-multiplication automorphisms, and (when built as a
    cover of a given extension) the covering map onto it."""

    base: Structure
    structure: Structure
    pi: StructureMap
    ps: PartialIsoSet
    phi: tuple[Perm, ...]
    psi: StructureMap | None
    classes: tuple[CosetClassInfo, ...]
    coset_reps: tuple[tuple[Perm, ...], ...]
    quotient: FiniteQuotient
    notes: tuple[str, ...]

    def as_hl_extension(self) -> HLExtension:
        return HLExtension(self.base, self.structure, self.ps, self.phi)


def _coset_decomposition(elements: tuple[Perm, ...], subgroup: frozenset[Perm]):
    """Left cosets g*S scanning the (sorted) elements; returns the map
    element -> coset index and the list of coset representatives (each the
    least element of its coset, in ascending order)."""
    coset_of: dict[Perm, int] = {}
    reps: list[Perm] = []
    for g in elements:
        if g in coset_of:
            continue
        k = len(reps)
        reps.append(g)
        for s in subgroup:
            coset_of[g * s] = k
    return coset_of, reps


def build_coset_extension(c: Structure, q: FiniteQuotient,
                          cap: int = DEFAULT_CLOSURE_CAP,
                          _pointwise_stabs: list[list[Perm]] | None = None
                          ) -> CosetExtension:
    """The coset-space extension of c determined by a finite quotient of the
    word group over c's partial isomorphisms.

    One coset class per factorization class; relations are the orbit, under
    left multiplication by the image group, of the embedded base relations
    (a relation tuple's entry over a class representative is witnessed by the
    empty word).  The base map is checked to be an embedding and the call
    fails with EmbeddingFailure when the quotient is too coarse.
    """
    ps = enumerate_partial_isos(c, nonidentity=True)
    ctx = WordContext.for_partial_isos(ps)
    q = q.completed(ctx) if ps.members else q
    fact = natural_factorization(c)

    images = [q.image(ps.name(i)) for i in range(len(ps.members))]
    degree = q.degree
    if images:
        group = close_group(tuple(images), carrier=tuple(str(i) for i in range(degree)),
                            cap=cap)
    else:
        group = PermGroup(tuple(str(i) for i in range(degree)), (),
                          (Perm.identity(degree),))

    n_classes = len(fact.classes)
    coset_maps = []
    coset_reps = []
    class_infos = []
    for ci, (members, rep) in enumerate(fact.classes):
        gens = stabilizer_generators(c, ps, rep)
        subgroup_gens = [quotient_image(w, q, ctx) for w in gens]
        if _pointwise_stabs is not None:
            subgroup_gens.extend(_pointwise_stabs[ci])
        if subgroup_gens:
            subgroup = frozenset(close_group(tuple(subgroup_gens), cap=cap).elements)
        else:
            subgroup = frozenset({Perm.identity(degree)})
        coset_of, reps = _coset_decomposition(group.elements, subgroup)
        coset_maps.append(coset_of)
        coset_reps.append(reps)
        class_infos.append(CosetClassInfo(ci, rep, len(subgroup), len(reps)))

    # pi: base element -> (class, coset of its witness word's image)
    pi_word_perm: dict[str, Perm] = {}
    pi_coset: dict[str, tuple[int, int]] = {}
    for ci, (members, rep) in enumerate(fact.classes):
        for a in members:
            if a == rep:
                perm = Perm.identity(degree)
            else:
                member_idx = next(i for i, m in enumerate(ps.members)
                                  if m.apply(rep) == a)
                perm = images[member_idx]
            pi_word_perm[a] = perm
            pi_coset[a] = (ci, coset_maps[ci][perm])
    if len(set(pi_coset.values())) != len(pi_coset):
        collided = sorted({a for a in pi_coset for b in pi_coset
                           if a != b and pi_coset[a] == pi_coset[b]})
        raise EmbeddingFailure(
            f"quotient too coarse: base elements {collided} share a coset")

    # relations: orbit of the embedded base tuples under left multiplication
    gamma_tables: dict[str, set[tuple[tuple[int, int], ...]]] = {
        name: set() for name in c.sig.names}
    for name, rows in c.tables:
        for row in rows:
            base_perms = [pi_word_perm[e] for e in row]
            classes = [fact.class_of(e) for e in row]
            for g in group.elements:
                gamma_tables[name].add(tuple(
                    (classes[j], coset_maps[classes[j]][g * base_perms[j]])
                    for j in range(len(row))))

    # to element ids: base-image cosets keep the base element's id
    id_of: dict[tuple[int, int], str] = {}
    for a, ck in pi_coset.items():
        id_of[ck] = a
    taken = set(id_of.values())
    domain_order: list[str] = []
    for ci in range(n_classes):
        for k in range(len(coset_reps[ci])):
            key = (ci, k)
            if key not in id_of:
                name = f"g{k}H{ci + 1}"
                while name in taken:
                    name += "'"
                id_of[key] = name
                taken.add(name)
            domain_order.append(id_of[key])

    relations = {name: {tuple(id_of[ck] for ck in row) for row in rows}
                 for name, rows in gamma_tables.items()}
    gamma = Structure.make(c.sig, tuple(domain_order), relations)

    pi = StructureMap.make(c, gamma, {a: id_of[ck] for a, ck in pi_coset.items()})
    if not pi.is_embedding():
        raise EmbeddingFailure(
            "quotient too coarse: relations on the embedded base do not match")

    # left-multiplication automorphisms, one per member
    phi: list[Perm] = []
    for i in range(len(ps.members)):
        perm_images = []
        for ci in range(n_classes):
            for k, rep_perm in enumerate(coset_reps[ci]):
                target = coset_maps[ci][images[i] * rep_perm]
                perm_images.append(gamma.index(id_of[(ci, target)]))
        phi.append(Perm(perm_images) if perm_images else Perm(()))

    return CosetExtension(c, gamma, pi, ps, tuple(phi), None,
                          tuple(class_infos),
                          tuple(tuple(reps) for reps in coset_reps), q, ())


def shrink_to_minimal(e: HLExtension, seeds=None) -> HLExtension:
    """Restrict an extension to the closure of its base (the automorphisms
    preserve that closure, so their restrictions stay automorphisms).

    Extra seed elements may be supplied; they and their orbits survive too.
    """
    keep = _closure_points(e, seeds)
    if len(keep) == len(e.ext.domain):
        return e
    kept_ids = [e.ext.domain[i] for i in sorted(keep)]
    sub = induced_substructure(e.ext, kept_ids)
    reindex = {old: sub.index(e.ext.domain[old]) for old in sorted(keep)}
    phi = {}
    for i, perm in enumerate(e.phi):
        images = [0] * len(kept_ids)
        for old in sorted(keep):
            images[reindex[old]] = reindex[perm(old)]
        phi[i] = Perm(images)
    return HLExtension.build(e.base, sub, phi, ps=e.ps)


def canonical_cover(e: HLExtension, forbidden=(),
                    cap: int = DEFAULT_CLOSURE_CAP) -> CosetExtension:
    """The coset cover of a verified minimal extension, with the covering map.

    The quotient is the action of the assigned automorphisms on the extension
    itself; each class's coset subgroup is enlarged by the pointwise
    stabilizer of the class orbit.  The result is itself a valid, minimal,
    pattern-free extension and the covering map is a surjective homomorphism
    commuting with the actions; failures of any of these checks raise
    CoverVerificationError since they should be impossible.
    """
    report = verify_hl_extension(e, forbidden)
    if not report.valid:
        raise InputError(f"extension fails verification: {report.failures}")
    notes: list[str] = []
    if not report.minimal:
        e = shrink_to_minimal(e)
        notes.append("input was not minimal; shrunk to the closure of the base")

    degree = len(e.ext.domain)
    q = FiniteQuotient.make(degree, {e.ps.name(i): e.phi[i]
                                     for i in range(len(e.ps.members))})
    group = e.generated_group(cap=cap)
    fact = natural_factorization(e.base)

    stabs: list[list[Perm]] = []
    for members, rep in fact.classes:
        rep_idx = e.ext.index(rep)
        orbit_pts = {rep_idx}
        frontier = [rep_idx]
        while frontier:
            nxt = []
            for x in frontier:
                for g in group.generators:
                    for y in (g(x), g.inv()(x)):
                        if y not in orbit_pts:
                            orbit_pts.add(y)
                            nxt.append(y)
            frontier = nxt
        stabs.append([g for g in group.elements
                      if all(g(x) == x for x in orbit_pts)])

    cover = build_coset_extension(e.base, q, cap=cap, _pointwise_stabs=stabs)

    # covering map: class-i coset with representative g  ->  g(rep_i)
    psi_map: dict[str, str] = {}
    pos = 0
    for info in cover.classes:
        rep_idx = e.ext.index(info.representative)
        for g in cover.coset_reps[info.class_index]:
            psi_map[cover.structure.domain[pos]] = e.ext.domain[g(rep_idx)]
            pos += 1
    psi = StructureMap.make(cover.structure, e.ext, psi_map)

    failures = []
    if set(psi_map.values()) != set(e.ext.domain):
        failures.append("covering map is not surjective")
    if not psi.is_homomorphism():
        failures.append("covering map is not a homomorphism")
    for i in range(len(e.ps.members)):
        for x in cover.structure.domain:
            lhs = e.phi[i](e.ext.index(psi_map[x]))
            rhs = psi_map[cover.structure.domain[cover.phi[i](cover.structure.index(x))]]
            if e.ext.domain[lhs] != rhs:
                failures.append(f"covering map does not intertwine phi(p{i})")
                break
        else:
            continue
        break
    gamma_report = verify_hl_extension(cover.as_hl_extension(), forbidden)
    if not gamma_report.valid:
        failures.extend(f"cover: {f}" for f in gamma_report.failures)
    if not gamma_report.minimal:
        failures.append("cover is not minimal")
    if failures:
        raise CoverVerificationError("; ".join(failures))

    return CosetExtension(cover.base, cover.structure, cover.pi, cover.ps,
                          cover.phi, psi, cover.classes, cover.coset_reps,
                          cover.quotient, tuple(notes))


def gamma_fragment(c: Structure, radius: int,
                   cap: int = 5000) -> "FragmentResult":
    """Bounded-radius fragment of the infinite coset structure over the free
    word group: all cosets reachable by words of length <= radius, with the
    relations whose left-multiplication witness also has length <= radius.

    Coset equality is decided by evaluating the reduced quotient word at the
    class representative.
    """
    ps = enumerate_partial_isos(c, nonidentity=True)
    ctx = WordContext.for_partial_isos(ps)
    fact = natural_factorization(c)

    letters = [ctx.letter(ps.name(i)) for i in range(len(ps.members))]

    def same_coset(w1, w2, rep) -> bool:
        return eval_partial_word(ctx.mul(ctx.inv(w1), w2), rep, ps) == rep

    class_cosets: list[list] = []       # per class: list of representative words
    coset_lookup: list[dict] = []       # per class: word -> index cache
    for members, rep in fact.classes:
        reps_words = [EMPTY_WORD]
        cache = {EMPTY_WORD: 0}
        frontier = [EMPTY_WORD]
        for _ in range(radius):
            nxt = []
            for w in frontier:
                for letter in letters:
                    w2 = ctx.mul(letter, w)
                    if w2 in cache:
                        continue
                    hit = None
                    for k, existing in enumerate(reps_words):
                        if same_coset(existing, w2, rep):
                            hit = k
                            break
                    if hit is None:
                        hit = len(reps_words)
                        reps_words.append(w2)
                        nxt.append(w2)
                        if len(reps_words) > cap:
                            raise CapExceeded(f"fragment exceeded {cap} cosets")
                    cache[w2] = hit
            frontier = nxt
        class_cosets.append(reps_words)
        coset_lookup.append(cache)

    # pi words per base element
    pi_words: dict[str, tuple] = {}
    for ci, (members, rep) in enumerate(fact.classes):
        for a in members:
            if a == rep:
                pi_words[a] = EMPTY_WORD
            else:
                member_idx = next(i for i, m in enumerate(ps.members)
                                  if m.apply(rep) == a)
                pi_words[a] = letters[member_idx]

    def locate(ci: int, word) -> int | None:
        cache = coset_lookup[ci]
        if word in cache:
            return cache[word]
        rep = fact.classes[ci][1]
        for k, existing in enumerate(class_cosets[ci]):
            if same_coset(existing, word, rep):
                cache[word] = k
                return k
        cache[word] = None
        return None

    # ids: base-image cosets keep base ids (they are materialized for
    # radius >= 1; at radius 0 only the representatives are)
    id_of: dict[tuple[int, int], str] = {}
    taken: set[str] = set()
    pi_map: dict[str, str] = {}
    for a, w in pi_words.items():
        ci = fact.class_of(a)
        k = locate(ci, w)
        if k is not None:
            id_of[(ci, k)] = a
            taken.add(a)
            pi_map[a] = a
    domain: list[str] = []
    labels: dict[str, dict] = {}
    for ci in range(len(fact.classes)):
        for k, w in enumerate(class_cosets[ci]):
            key = (ci, k)
            if key not in id_of:
                name = f"g{k}H{ci + 1}"
                while name in taken:
                    name += "'"
                id_of[key] = name
                taken.add(name)
            domain.append(id_of[key])
            labels[id_of[key]] = {"class": ci + 1, "word": ctx.format(w)}

    # witness words of length <= radius (reduced, breadth-first)
    witnesses = [EMPTY_WORD]
    seen_w = {EMPTY_WORD}
    frontier = [EMPTY_WORD]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for letter in letters:
                w2 = ctx.mul(letter, w)
                if w2 not in seen_w:
                    seen_w.add(w2)
                    nxt.append(w2)
                    if len(seen_w) > cap * 10:
                        raise CapExceeded("fragment witness enumeration blew up")
        frontier = nxt
        witnesses.extend(nxt)

    relations: dict[str, set[tuple[str, ...]]] = {name: set() for name in c.sig.names}
    for name, rows in c.tables:
        for row in rows:
            words = [pi_words[e] for e in row]
            classes = [fact.class_of(e) for e in row]
            for g in witnesses:
                ids = []
                for j in range(len(row)):
                    k = locate(classes[j], ctx.mul(g, words[j]))
                    if k is None:
                        ids = None
                        break
                    ids.append(id_of[(classes[j], k)])
                if ids is not None:
                    relations[name].add(tuple(ids))

    structure = Structure.make(c.sig, tuple(domain), relations)
    return FragmentResult(c, structure, labels, pi_map)


@dataclass(frozen=True)
class FragmentResult:
    base: Structure
    structure: Structure
    labels: dict[str, dict]
    pi: dict[str, str]

    def cover_onto(self, e: HLExtension) -> dict[str, str]:
        """The covering assignment coset -> extension point, mapping the coset
        of a word to the word's action on the class representative."""
        ps_e = e.ps
        ctx_frag = WordContext.for_partial_isos(enumerate_partial_isos(
            self.base, nonidentity=True))
        out: dict[str, str] = {}
        fact = natural_factorization(self.base)
        for coset_id, info in self.labels.items():
            rep = fact.classes[info["class"] - 1][1]
            word = ctx_frag.parse(info["word"])
            point = e.ext.index(rep)
            for i, sign in reversed(word):
                perm = e.phi[i] if sign == 1 else e.phi[i].inv()
                point = perm(point)
            out[coset_id] = e.ext.domain[point]
        return out


# -- coherence ----------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceReport:
    bases_nested: bool
    extensions_nested: bool
    maps_extend: bool
    inner_order: int | None
    restricted_order: int | None
    witness: Perm | None

    @property
    def coherent(self) -> bool:
        return (self.bases_nested and self.extensions_nested and self.maps_extend
                and self.inner_order is not None
                and self.inner_order == self.restricted_order)

    def as_dict(self) -> dict:
        return {
            "bases_nested": self.bases_nested,
            "extensions_nested": self.extensions_nested,
            "maps_extend": self.maps_extend,
            "inner_group_order": self.inner_order,
            "outer_subgroup_order": self.restricted_order,
            "coherent": self.coherent,
        }


def _member_lookup(ps_small: PartialIsoSet, ps_big: PartialIsoSet) -> list[int]:
    """Index in the big set of each member of the small set (same graph)."""
    pos = {m.pairs: i for i, m in enumerate(ps_big.members)}
    out = []
    for m in ps_small.members:
        if m.pairs not in pos:
            raise InputError("partial isomorphism of the small base is missing "
                             "from the large base's set")
        out.append(pos[m.pairs])
    return out


def check_coherent(e1: HLExtension, e2: HLExtension,
                   cap: int = DEFAULT_CLOSURE_CAP) -> CoherenceReport:
    """Nested extensions are coherent when the assignment correspondence on
    the smaller base's partial isomorphisms induces an isomorphism of the
    generated automorphism groups.

    Since each phi2(p) restricts to phi1(p) on the inner extension, the
    restriction map from the outer subgroup K2' = <phi2(p) : p of C1> onto
    K1 = <phi1(p)> is a surjective homomorphism; coherence holds exactly when
    |K2'| = |K1|.
    """
    bases_nested = extends(e2.base, e1.base)
    exts_nested = extends(e2.ext, e1.ext)
    if not (bases_nested and exts_nested):
        return CoherenceReport(bases_nested, exts_nested, False, None, None, None)

    lookup = _member_lookup(e1.ps, e2.ps)
    maps_extend = True
    for i1, i2 in enumerate(lookup):
        inner, outer = e1.phi[i1], e2.phi[i2]
        for d in e1.ext.domain:
            if e2.ext.domain[outer(e2.ext.index(d))] != e1.ext.domain[inner(e1.ext.index(d))]:
                maps_extend = False
                break
        if not maps_extend:
            break
    if not maps_extend:
        return CoherenceReport(bases_nested, exts_nested, False, None, None, None)

    k1 = e1.generated_group(cap=cap)
    outer_gens = tuple(e2.phi[i2] for i2 in lookup)
    if outer_gens:
        k2p = close_group(outer_gens, carrier=e2.ext.domain, cap=cap)
    else:
        k2p = PermGroup(e2.ext.domain, (), (Perm.identity(len(e2.ext.domain)),))

    witness = None
    if k2p.order != k1.order:
        inner_idx = [e2.ext.index(d) for d in e1.ext.domain]
        for g in k2p.elements:
            if g.is_identity():
                continue
            if all(g(i) == i for i in inner_idx):
                witness = g
                break
    return CoherenceReport(bases_nested, exts_nested, True, k1.order, k2p.order,
                           witness)


def brute_force_coherence(e1: HLExtension, e2: HLExtension,
                          cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    """Independent verdict: close the diagonal subgroup of pairs
    (phi1(p), phi2(p)) and demand both projections be injective on it."""
    lookup = _member_lookup(e1.ps, e2.ps)
    pairs = [(e1.phi[i1], e2.phi[i2]) for i1, i2 in enumerate(lookup)]
    ident = (Perm.identity(len(e1.ext.domain)), Perm.identity(len(e2.ext.domain)))
    seen = {ident}
    frontier = [ident]
    step = pairs + [(a.inv(), b.inv()) for a, b in pairs]
    while frontier:
        nxt = []
        for x1, x2 in frontier:
            for g1, g2 in step:
                y = (g1 * x1, g2 * x2)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise CapExceeded("diagonal closure exceeded cap")
                    nxt.append(y)
        frontier = nxt
    firsts = {a for a, _ in seen}
    seconds = {b for _, b in seen}
    return len(firsts) == len(seen) and len(seconds) == len(seen)
