"""Bounded deterministic search for extensions by automorphisms.

The search space is: a point set of bounded size containing the base, one
permutation per inverse-pair of partial isomorphisms (pinned where the map
or an inherited automorphism dictates), and relation tables that are forced
to be the orbit closure of the base tables - the least invariant choice.
The closure is maintained incrementally (every new point pair immediately
propagates all tuple images it completes, with trail-based undo), so a
tuple violating an exactness window (the base must stay induced) kills a
branch at the assignment creating it; forbidden-pattern checks run after
each completed permutation.  Both conditions are monotone in the tables, so
pruning on partial closures is sound.

Fresh points are interchangeable until first mentioned: image choices are
restricted to already-mentioned points plus the first unused fresh point,
and any valid assignment is a renaming of one the unpruned search visits.
Every derived tuple carries the set of generators used to derive it and
failures report the generators involved, enabling conflict-directed
backjumping.

A full joint search over all generators thrashes when witnesses are highly
symmetric, so the driver runs a portfolio of deterministic passes:

1. an exact-size pass over the base points only,
2. a two-phase pass: the least-pinned generators are assigned first and the
   tables then frozen, every remaining generator needing an automorphism of
   the fixed structure (failures backjump into the table-shaping phase),
3. a full joint pass at the size bound with backjumping,
4. a plain chronological joint pass at the size bound, with no node budget.

Passes 1-3 are budgeted finders; any witness they produce is verified
independently before being returned.  Only the exhaustive final pass
certifies a "none" answer (a smaller witness always extends to the size
bound by fixed isolated points, so one bound decides existence within it).
Everything is deterministic, so witnesses and "none" answers are
reproducible.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .errors import InputError
from .extensions import (HLExtension, check_coherent, shrink_to_minimal,
                         verify_hl_extension)
from .groups import DEFAULT_CLOSURE_CAP, Perm, close_group
from .partial_iso import PartialIsoSet, enumerate_partial_isos
from .structures import Structure, extends, induced_substructure, is_T_free

DEFAULT_FINDER_BUDGET = 400000


class _BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class _Pattern:
    size: int
    by_last: tuple[tuple[tuple[str, tuple[int, ...]], ...], ...]


def _compile_pattern(t: Structure) -> _Pattern:
    by_last: list[list[tuple[str, tuple[int, ...]]]] = [[] for _ in t.domain]
    for name, rows in t.tables:
        for row in rows:
            idx = tuple(t.index(e) for e in row)
            if idx:
                by_last[max(idx)].append((name, idx))
    return _Pattern(len(t.domain), tuple(tuple(c) for c in by_last))


def _find_hom(tabs: dict[str, set[tuple[int, ...]]], n: int,
              pattern: _Pattern):
    """A homomorphic image of the pattern in the tables, or None; returns
    the list of table tuples it uses (for conflict reporting)."""
    k = pattern.size
    if k == 0:
        return []
    if n == 0:
        return None
    img = [-1] * k

    def ok(j: int) -> bool:
        for name, idx in pattern.by_last[j]:
            if tuple(img[i] for i in idx) not in tabs[name]:
                return False
        return True

    j = 0
    img[0] = 0
    while True:
        if ok(j):
            if j == k - 1:
                used = []
                for row_checks in pattern.by_last:
                    for name, idx in row_checks:
                        used.append((name, tuple(img[i] for i in idx)))
                return used
            j += 1
            img[j] = 0
            continue
        while img[j] == n - 1:
            img[j] = -1
            j -= 1
            if j < 0:
                return None
        img[j] += 1


@dataclass
class _Gen:
    member: int
    pins: dict[int, int]
    involution: bool


class _Searcher:
    """One search pass.  `backjump` switches conflict-directed jumping on
    (finder passes) or off (the complete decider pass); `freeze_after`
    freezes the tables once that many generators are assigned; `budget`
    bounds the number of point assignments tried."""

    def __init__(self, labels, base_tables, protected, gens, patterns,
                 coherence, closure_cap, backjump, n_base,
                 freeze_after=None, budget=None):
        self.labels = labels
        self.n = len(labels)
        self.tabs = {name: set(rows) for name, rows in base_tables.items()}
        self.dep = {(name, row): 0 for name, rows in base_tables.items()
                    for row in rows}
        # windows: (point set, allowed tables, conflict mask)
        self.protected = [(pts, allowed, 0) for pts, allowed in protected]
        self.gens = gens
        self.patterns = patterns
        self.coherence = coherence
        self.closure_cap = closure_cap
        self.backjump = backjump
        self.n_base = n_base
        self.freeze_after = freeze_after
        self.budget = budget
        self.nodes = 0
        self.sigma = [[-1] * self.n for _ in gens]
        self.sigma_inv = [[-1] * self.n for _ in gens]
        self.touched = [False] * self.n
        self.by_point: dict[int, list] = {p: [] for p in range(self.n)}
        for name, rows in self.tabs.items():
            for row in rows:
                for e in set(row):
                    self.by_point[e].append((name, row))
        self.steps: list[tuple[tuple[int, ...], int]] = []  # (images, gen bit)
        self.last_conflict = 0

    def _violating_mask(self, name: str, row: tuple[int, ...]):
        for points, allowed, mask in self.protected:
            if row not in allowed[name] and all(e in points for e in row):
                return mask
        return None

    # -- incremental closure with dependency masks --------------------------------

    def _propagate(self, k: int, seeds, added) -> int | None:
        """Chase images of the seed tuples through completed generators and
        the assigned part of generator k; returns a conflict mask on
        violation, None on success."""
        sigma, sigma_inv = self.sigma[k], self.sigma_inv[k]
        kbit = 1 << k
        queue = list(seeds)
        while queue:
            name, row = queue.pop()
            base_mask = self.dep[(name, row)]
            for images, bit in self.steps:
                u = tuple(images[e] for e in row)
                if u not in self.tabs[name]:
                    mask = base_mask | bit
                    wmask = self._violating_mask(name, u)
                    if wmask is not None:
                        return mask | wmask
                    self.tabs[name].add(u)
                    self.dep[(name, u)] = mask
                    for e in set(u):
                        self.by_point[e].append((name, u))
                    added.append((name, u))
                    queue.append((name, u))
            for partial in (sigma, sigma_inv):
                defined = True
                for e in row:
                    if partial[e] == -1:
                        defined = False
                        break
                if defined:
                    u = tuple(partial[e] for e in row)
                    if u not in self.tabs[name]:
                        mask = base_mask | kbit
                        wmask = self._violating_mask(name, u)
                        if wmask is not None:
                            return mask | wmask
                        self.tabs[name].add(u)
                        self.dep[(name, u)] = mask
                        for e in set(u):
                            self.by_point[e].append((name, u))
                        added.append((name, u))
                        queue.append((name, u))
        return None

    # -- assignment bookkeeping -----------------------------------------------------

    def _try_set(self, k: int, v: int, w: int):
        """Assign sigma_k(v) = w (plus the mirror pair for involutions) and
        propagate; returns an undo record, or None with last_conflict set."""
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _BudgetExceeded()
        gen = self.gens[k]
        sigma, sigma_inv = self.sigma[k], self.sigma_inv[k]
        kbit = 1 << k
        pairs = [(v, w)]
        if gen.involution and w != v:
            pairs.append((w, v))
        assigned: list[tuple[int, int]] = []
        newly_touched: list[int] = []
        added: list[tuple[str, tuple[int, ...]]] = []
        record = (assigned, newly_touched, added)
        for a, b in pairs:
            if sigma[a] != -1:
                if sigma[a] == b:
                    continue
                self._undo(k, record)
                self.last_conflict = kbit
                return None
            if sigma_inv[b] != -1:
                self._undo(k, record)
                self.last_conflict = kbit
                return None
            sigma[a] = b
            sigma_inv[b] = a
            assigned.append((a, b))
            for p in (a, b):
                if not self.touched[p]:
                    self.touched[p] = True
                    newly_touched.append(p)
            seeds = []
            for name, row in self.by_point[a]:
                if all(sigma[e] != -1 for e in row):
                    seeds.append((name, row))
            for name, row in self.by_point[b]:
                if all(sigma_inv[e] != -1 for e in row):
                    seeds.append((name, row))
            conflict = self._propagate(k, seeds, added)
            if conflict is not None:
                self._undo(k, record)
                self.last_conflict = conflict | kbit
                return None
        return record

    def _undo(self, k: int, record):
        assigned, newly_touched, added = record
        sigma, sigma_inv = self.sigma[k], self.sigma_inv[k]
        for name, row in reversed(added):
            self.tabs[name].discard(row)
            del self.dep[(name, row)]
            for e in set(row):
                last = self.by_point[e].pop()
                if last != (name, row):
                    raise AssertionError("tuple index corrupted")
        for a, b in reversed(assigned):
            sigma[a] = -1
            sigma_inv[b] = -1
        for p in newly_touched:
            self.touched[p] = False

    def _next_arg(self, k: int):
        sigma = self.sigma[k]
        fallback = None
        for v in range(self.n):
            if sigma[v] != -1:
                continue
            if self.touched[v]:
                return v
            if fallback is None:
                fallback = v
        return fallback

    def _candidates(self, k: int):
        sigma_inv = self.sigma_inv[k]
        first_untouched = None
        for w in range(self.n):
            if not self.touched[w]:
                first_untouched = w
                break
        out = []
        for w in range(self.n):
            if sigma_inv[w] != -1:
                continue
            if self.touched[w] or w == first_untouched:
                out.append(w)
        return out

    # -- main recursion ---------------------------------------------------------------

    def run(self):
        for name, rows in self.tabs.items():
            for row in rows:
                if self._violating_mask(name, row) is not None:
                    raise InputError("base tables violate their own exactness window")
        for p in self.patterns:
            if _find_hom(self.tabs, self.n, p) is not None:
                return None
        for p in range(self.n_base):
            self.touched[p] = True
        needed = (len(self.gens) + 1) * (self.n + 3) + 200
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)
        result, _ = self._assign_generator(0)
        return result

    def _assign_generator(self, k: int):
        if k == len(self.gens):
            return ([list(s) for s in self.sigma], self.tabs), 0
        gen = self.gens[k]
        kbit = 1 << k
        records = []
        conflict = 0
        ok = True
        for v in sorted(gen.pins):
            rec = self._try_set(k, v, gen.pins[v])
            if rec is None:
                conflict = self.last_conflict
                ok = False
                break
            records.append(rec)
        if ok:
            result, conflict = self._extend_perm(k)
            if result is not None:
                return result, 0
        for rec in reversed(records):
            self._undo(k, rec)
        return None, conflict & ~kbit

    def _extend_perm(self, k: int):
        v = self._next_arg(k)
        if v is None:
            return self._complete_generator(k)
        kbit = 1 << k
        acc = 0
        for w in self._candidates(k):
            rec = self._try_set(k, v, w)
            if rec is None:
                acc |= self.last_conflict
                continue
            result, conflict = self._extend_perm(k)
            if result is not None:
                return result, 0
            self._undo(k, rec)
            if self.backjump and conflict and not conflict & kbit:
                return None, conflict
            acc |= conflict
        return None, acc | kbit

    def _complete_generator(self, k: int):
        kbit = 1 << k
        for p in self.patterns:
            used = _find_hom(self.tabs, self.n, p)
            if used is not None:
                conflict = kbit
                for key in used:
                    conflict |= self.dep[key]
                return None, conflict
        if self.coherence is not None and k == self.coherence[1]:
            order, _ = self.coherence
            perms = tuple(Perm(self.sigma[j]) for j in range(k + 1))
            group = close_group(perms, cap=self.closure_cap)
            if group.order != order:
                return None, (1 << (k + 1)) - 1
        frozen = (self.freeze_after is not None and k == self.freeze_after - 1)
        if frozen:
            snapshot = {name: frozenset(rows) for name, rows in self.tabs.items()}
            core_mask = (1 << self.freeze_after) - 1
            self.protected.append((set(range(self.n)), snapshot, core_mask))
        self.steps.append((tuple(self.sigma[k]), kbit))
        self.steps.append((tuple(self.sigma_inv[k]), kbit))
        result, conflict = self._assign_generator(k + 1)
        if result is not None:
            return result, 0
        self.steps.pop()
        self.steps.pop()
        if frozen:
            self.protected.pop()
        return None, conflict


def _fresh_labels(taken, count: int) -> list[str]:
    out = []
    taken = set(taken)
    j = 1
    while len(out) < count:
        name = f"w{j}"
        while name in taken:
            name += "'"
        out.append(name)
        taken.add(name)
        j += 1
    return out


# -- translation-closed hosts ---------------------------------------------------
#
# Highly symmetric witnesses (cycles, complete multipartite graphs, rook-like
# grids) defeat point-by-point joint search, but they are all coset
# structures of abelian groups acting regularly: the tables are unions of
# translation orbits of the embedded base tuples.  Enumerating abelian
# groups by invariant factors and the ways to dock the base into them gives
# a small canonical family of candidate hosts; each candidate needs only
# independent per-generator automorphism searches over its fixed tables.


def _invariant_factor_chains(n: int):
    """Ascending chains d1 | d2 | ... with product n (one per abelian group
    of order n), in canonical order."""
    if n == 1:
        yield ()
        return

    def rec(remaining, minimum):
        if remaining == 1:
            yield ()
            return
        d = minimum
        while d <= remaining:
            if remaining % d == 0:
                for rest in rec(remaining // d, d):
                    # invariant factors require d | next factor
                    if not rest or rest[0] % d == 0:
                        yield (d,) + rest
            d += 1

    yield from rec(n, 2)


def _cayley_hosts(c: Structure, max_size: int, forbidden, limit: int = 20000):
    """Candidate extensions whose domain is an abelian group and whose tables
    are the translation orbits of an embedded copy of the base; the
    embedding must keep the base induced and the host pattern-free."""
    if not c.domain:
        return
    count = 0
    for order in range(max(len(c.domain), 2), max_size + 1):
        for factors in _invariant_factor_chains(order):
            elements = list(_group_elements(factors))
            index = {g: i for i, g in enumerate(elements)}

            def add(g, h):
                return tuple((a + b) % f for a, b, f in zip(g, h, factors))

            def sub(g, h):
                return tuple((a - b) % f for a, b, f in zip(g, h, factors))

            zero = elements[0]
            others = elements[1:]
            for mapping in _dockings(c, elements, zero, others):
                count += 1
                if count > limit:
                    return
                tables = {}
                for name, rows in c.tables:
                    orbit = set()
                    for row in rows:
                        base_row = tuple(mapping[e] for e in row)
                        for g in elements:
                            orbit.add(tuple(add(x, g) for x in base_row))
                    tables[name] = orbit
                # exactness: the embedded base must stay induced
                image = {mapping[e]: e for e in c.domain}
                exact = True
                for name, rows in c.tables:
                    for row in tables[name]:
                        if all(x in image for x in row):
                            if tuple(image[x] for x in row) not in rows:
                                exact = False
                                break
                    if not exact:
                        break
                if not exact:
                    continue
                labels = []
                taken = set(c.domain)
                label_of = {}
                for g in elements:
                    if g in image:
                        label_of[g] = image[g]
                    else:
                        name_g = "g" + "_".join(str(x) for x in g)
                        while name_g in taken:
                            name_g += "'"
                        taken.add(name_g)
                        label_of[g] = name_g
                domain = [label_of[g] for g in elements]
                relations = {name: {tuple(label_of[x] for x in row)
                                    for row in rows}
                             for name, rows in tables.items()}
                host = Structure.make(c.sig, domain, relations)
                ok, _ = is_T_free(host, forbidden)
                if ok:
                    yield host


def _group_elements(factors):
    if not factors:
        yield ()
        return
    for rest in _group_elements(factors[1:]):
        for a in range(factors[0]):
            yield (a,) + rest


def _dockings(c: Structure, elements, zero, others):
    """Injections of the base into the group, first base point at the
    identity (translations make that free), the rest in canonical order."""
    rest = list(c.domain[1:])

    def rec(assigned, used):
        if len(assigned) == len(c.domain):
            yield dict(assigned)
            return
        e = c.domain[len(assigned)]
        for g in others:
            if g in used:
                continue
            yield from rec(assigned + [(e, g)], used | {g})

    yield from rec([(c.domain[0], zero)], {zero})


def _run_seeded(c: Structure, host: Structure, ps: PartialIsoSet,
                pins_by_member, forbidden, closure_cap: int, budget: int):
    """Extension search over a fixed host: tables frozen from the start, so
    the generators are independent automorphism searches and any dead
    generator aborts the candidate."""
    labels = tuple(host.domain)
    pos = {e: i for i, e in enumerate(labels)}
    base_tables = {name: {tuple(pos[e] for e in row) for row in rows}
                   for name, rows in host.tables}
    protected = []
    for struct in (c, host):
        pts = {pos[e] for e in struct.domain}
        allowed = {name: frozenset(tuple(pos[e] for e in row) for row in rows)
                   for name, rows in struct.tables}
        protected.append((pts, allowed))
    reps = list(ps.representatives())
    gens = [_Gen(m, {pos[a]: pos[b] for a, b in pins_by_member[m].items()},
                 ps.is_involution(m)) for m in reps]
    searcher = _Searcher(labels, base_tables, protected, gens, (), None,
                         closure_cap, True, len(host.domain), budget=budget)
    try:
        found = searcher.run()
    except _BudgetExceeded:
        return None
    if found is None:
        return None
    sigmas, _ = found
    phi = {reps[j]: Perm(sigmas[j]) for j in range(len(reps))}
    return HLExtension.build(c, host, phi, ps=ps)


@dataclass(frozen=True)
class _Pass:
    gen_order: tuple[int, ...]
    size: int
    backjump: bool
    freeze_after: int | None
    budget: int | None


def _run_passes(base: Structure, ext_base: Structure, ps: PartialIsoSet,
                pins_by_member, protected_structs, forbidden, coherence,
                passes, closure_cap: int):
    patterns = tuple(_compile_pattern(t) for t in forbidden)
    for planned in passes:
        labels = tuple(base.domain) + tuple(
            _fresh_labels(base.domain, planned.size - len(base.domain)))
        pos = {e: i for i, e in enumerate(labels)}
        base_tables = {name: {tuple(pos[e] for e in row) for row in rows}
                       for name, rows in base.tables}
        protected = []
        for struct in protected_structs:
            pts = {pos[e] for e in struct.domain}
            allowed = {name: frozenset(tuple(pos[e] for e in row)
                                       for row in rows)
                       for name, rows in struct.tables}
            protected.append((pts, allowed))
        gens = []
        for m in planned.gen_order:
            pins = {pos[a]: pos[b] for a, b in pins_by_member[m].items()}
            gens.append(_Gen(m, pins, ps.is_involution(m)))
        searcher = _Searcher(labels, base_tables, protected, gens, patterns,
                             coherence, closure_cap, planned.backjump,
                             len(base.domain),
                             freeze_after=planned.freeze_after,
                             budget=planned.budget)
        try:
            found = searcher.run()
        except _BudgetExceeded:
            continue
        if found is None:
            # only an unbudgeted chronological pass certifies a refusal
            if planned.budget is None and not planned.backjump \
                    and planned.freeze_after is None:
                return None
            continue
        sigmas, tabs = found
        relations = {name: {tuple(labels[e] for e in row) for row in rows}
                     for name, rows in tabs.items()}
        ext = Structure.make(base.sig, labels, relations)
        phi = {planned.gen_order[j]: Perm(sigmas[j])
               for j in range(len(planned.gen_order))}
        return HLExtension.build(ext_base, ext, phi, ps=ps)
    return None


def _portfolio(reps, pins, inner_first, base_size, max_size, finder_budget):
    """The deterministic pass list: exact-size joint, frozen-table two-phase,
    full joint with backjumping, then the complete chronological decider."""
    order_joint = tuple(inner_first) + tuple(
        i for i in reps if i not in set(inner_first))
    loose = min((len(pins[i]) for i in reps if i not in set(inner_first)),
                default=0)
    core = list(inner_first) + [i for i in reps
                                if i not in set(inner_first)
                                and len(pins[i]) <= loose]
    frozen_rest = [i for i in reps if i not in set(core)]
    order_frozen = tuple(core) + tuple(frozen_rest)
    passes = [_Pass(order_joint, base_size, True, None, finder_budget)]
    if max_size > base_size:
        passes.append(_Pass(order_frozen, max_size, True, len(core),
                            finder_budget))
        passes.append(_Pass(order_joint, max_size, True, None, finder_budget))
        passes.append(_Pass(order_joint, max_size, False, None, None))
    else:
        passes.append(_Pass(order_joint, base_size, False, None, None))
    return passes


def find_hl_extension(c: Structure, forbidden=(), max_size: int | None = None,
                      closure_cap: int = DEFAULT_CLOSURE_CAP,
                      finder_budget: int = DEFAULT_FINDER_BUDGET
                      ) -> HLExtension | None:
    """First extension of c, in the canonical portfolio order, in which every
    nonidentity partial isomorphism extends to an automorphism and no
    forbidden pattern maps in; None exactly when no witness with at most
    max_size points exists (which does not refute existence beyond the
    bound).

    The found witness is shrunk to the closure of its base, making it
    minimal.
    """
    forbidden = tuple(forbidden)
    ok, _ = is_T_free(c, forbidden)
    if not ok:
        raise InputError("the base structure itself is not pattern-free")
    if max_size is None:
        max_size = len(c.domain)
    if max_size < len(c.domain):
        return None
    ps = enumerate_partial_isos(c, nonidentity=True)
    reps = list(ps.representatives())
    pins = {i: ps.members[i].as_dict() for i in reps}
    passes = _portfolio(reps, pins, [], len(c.domain), max_size, finder_budget)
    e = _run_passes(c, c, ps, pins, [c], forbidden, None, passes[:1],
                    closure_cap)
    if e is None:
        for host in _cayley_hosts(c, max_size, forbidden):
            e = _run_seeded(c, host, ps, pins, forbidden, closure_cap,
                            budget=finder_budget // 4)
            if e is not None:
                break
    if e is None:
        e = _run_passes(c, c, ps, pins, [c], forbidden, None, passes[1:],
                        closure_cap)
    if e is None:
        return None
    e = shrink_to_minimal(e)
    report = verify_hl_extension(e, forbidden)
    if not report.valid:
        raise AssertionError(
            f"search returned an invalid witness: {report.failures}")
    return e


def find_coherent_extension(c2: Structure, e1: HLExtension, forbidden=(),
                            max_size: int | None = None,
                            ambient: Structure | None = None,
                            closure_cap: int = DEFAULT_CLOSURE_CAP,
                            finder_budget: int = DEFAULT_FINDER_BUDGET
                            ) -> HLExtension | None:
    """First extension of c2, in the canonical portfolio order, that is a
    valid pattern-free extension coherent with e1 (over e1's base, an
    induced substructure of c2); None exactly when no witness fits in
    max_size.

    With `ambient` given, the result must additionally induce the ambient
    structure on the union of e1's extension and c2 (used when both live
    inside a larger structure that must stay induced).
    """
    forbidden = tuple(forbidden)
    if not verify_hl_extension(e1, forbidden).valid:
        raise InputError("e1 fails verification")
    if not extends(c2, e1.base):
        raise InputError("e1's base is not an induced substructure of c2")
    ok, _ = is_T_free(c2, forbidden)
    if not ok:
        raise InputError("c2 is not pattern-free")

    d1 = e1.ext
    common = sorted(set(d1.domain) & set(c2.domain), key=d1.index)
    if induced_substructure(d1, common).relations_dict() != \
            induced_substructure(c2, common).relations_dict():
        raise InputError("e1's extension and c2 disagree on their overlap")

    union_domain = tuple(d1.domain) + tuple(e for e in c2.domain
                                            if e not in set(d1.domain))
    if ambient is not None:
        base = induced_substructure(ambient, union_domain)
        if not (extends(base, d1) and extends(base, c2)):
            raise InputError("ambient structure does not induce the inputs")
    else:
        relations = {name: set(rows) | set(c2.rel(name))
                     for name, rows in d1.tables}
        base = Structure.make(c2.sig, union_domain, relations)

    ok, _ = is_T_free(base, forbidden)
    if not ok:
        return None

    ps2 = enumerate_partial_isos(c2, nonidentity=True)
    member_of_graph = {m.pairs: i for i, m in enumerate(ps2.members)}
    inner_members = {}
    for i1, m in enumerate(e1.ps.members):
        if m.pairs not in member_of_graph:
            raise InputError("partial isomorphism of e1's base missing in c2's set")
        inner_members[member_of_graph[m.pairs]] = i1

    pins: dict[int, dict[str, str]] = {}
    for i2 in ps2.representatives():
        graph = dict(ps2.members[i2].as_dict())
        if i2 in inner_members:
            inner_perm = e1.phi[inner_members[i2]]
            for d in d1.domain:
                graph[d] = d1.domain[inner_perm(d1.index(d))]
        pins[i2] = graph

    reps = list(ps2.representatives())
    inner_reps = [i for i in reps if i in inner_members]

    k1 = e1.generated_group(cap=closure_cap)
    coherence = (k1.order, len(inner_reps) - 1) if inner_reps else None
    if not inner_reps and k1.order != 1:
        raise AssertionError("no generators but nontrivial inner group")

    protected = [d1, c2] + ([base] if ambient is not None else [])

    if max_size is None:
        max_size = len(base.domain)
    if max_size < len(base.domain):
        return None
    passes = _portfolio(reps, pins, inner_reps, len(base.domain), max_size,
                        finder_budget)
    e2 = _run_passes(base, c2, ps2, pins, protected, forbidden, coherence,
                     passes, closure_cap)
    if e2 is None:
        return None
    e2 = shrink_to_minimal(e2, seeds=base.domain)
    report = verify_hl_extension(e2, forbidden)
    coh = check_coherent(e1, e2, cap=closure_cap)
    if not (report.valid and coh.coherent):
        raise AssertionError("search returned a non-coherent witness")
    return e2
