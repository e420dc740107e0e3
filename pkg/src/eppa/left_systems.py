"""Left systems of coset equations, finite solvers, the pattern-gadget
encoding, extension-condition systems, and finite-quotient separation.

A left system over subgroup slots H_1..H_n has equations of the two shapes

    x H_j = g H_j          (constant right-hand side)
    x H_j = y g H_j        (variable right-hand side, optional constant)

with variables x, y and constants g referring to group elements.  Systems
are solved by brute force over small materialized groups; "unsolvable after
enlarging the subgroups by a finite-index kernel" is what the separation
search looks for.  The slot name "H0" always denotes the trivial subgroup
and may be left undeclared.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import CapExceeded, InputError
from .groups import (DEFAULT_CLOSURE_CAP, EMPTY_WORD, FiniteQuotient, Perm,
                     PermGroup, Word, WordContext, close_group, quotient_image,
                     stabilizer_generators, subgroup_image)
from .partial_iso import PartialIsoSet
from .structures import (Signature, Structure, is_gaifman_clique,
                         natural_factorization)

TRIVIAL_SLOT = "H0"
DEFAULT_GROUP_CAP = 5040


@dataclass(frozen=True)
class Equation:
    lhs: str
    slot: str
    rhs_var: str | None
    rhs_const: str | None

    def variables(self) -> tuple[str, ...]:
        return (self.lhs,) if self.rhs_var is None else (self.lhs, self.rhs_var)


@dataclass(frozen=True)
class LeftSystem:
    variables: tuple[str, ...]
    constants: tuple[str, ...]
    equations: tuple[Equation, ...]

    def __post_init__(self):
        declared_v, declared_c = set(self.variables), set(self.constants)
        for eq in self.equations:
            for v in eq.variables():
                if v not in declared_v:
                    raise InputError(f"equation uses undeclared variable {v!r}")
            if eq.rhs_const is not None and eq.rhs_const not in declared_c:
                raise InputError(f"equation uses undeclared constant {eq.rhs_const!r}")

    @staticmethod
    def make(variables, constants, equations) -> "LeftSystem":
        eqs = tuple(Equation(*e) if not isinstance(e, Equation) else e
                    for e in equations)
        return LeftSystem(tuple(variables), tuple(constants), eqs)

    @property
    def slots(self) -> tuple[str, ...]:
        seen: list[str] = []
        for eq in self.equations:
            if eq.slot not in seen:
                seen.append(eq.slot)
        return tuple(seen)


@dataclass(frozen=True)
class FiniteCosetSpec:
    """Subgroups given as closed element sets of a materialized group."""

    group: PermGroup
    subgroups: tuple[tuple[str, frozenset[Perm]], ...]
    constants: tuple[tuple[str, Perm], ...]
    _subs: dict = field(init=False, compare=False, repr=False, hash=False)
    _consts: dict = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_subs", dict(self.subgroups))
        object.__setattr__(self, "_consts", dict(self.constants))
        elements = set(self.group.elements)
        for name, sub in self.subgroups:
            if not sub <= elements:
                raise InputError(f"subgroup {name} is not inside the group")
            for a in sub:
                for b in sub:
                    if a * b not in sub:
                        raise InputError(f"subgroup {name} is not closed")

    @staticmethod
    def make(group: PermGroup, subgroup_gens: dict, constants: dict
             ) -> "FiniteCosetSpec":
        subs = {}
        for name, gens in subgroup_gens.items():
            gens = tuple(gens)
            if gens:
                subs[name] = frozenset(close_group(gens).elements)
            else:
                subs[name] = frozenset({Perm.identity(len(group.carrier))})
        return FiniteCosetSpec(group, tuple(sorted(subs.items())),
                               tuple(sorted(constants.items())))

    def subgroup(self, slot: str) -> frozenset[Perm]:
        if slot in self._subs:
            return self._subs[slot]
        if slot == TRIVIAL_SLOT:
            return frozenset({Perm.identity(len(self.group.carrier))})
        raise InputError(f"unknown subgroup slot {slot!r}")

    def constant(self, name: str | None) -> Perm:
        if name is None:
            return Perm.identity(len(self.group.carrier))
        if name in self._consts:
            return self._consts[name]
        raise InputError(f"unknown constant {name!r}")


@dataclass(frozen=True)
class FreeCosetSpec:
    """Subgroups of the free word group, given by generator words."""

    ctx: WordContext
    subgroup_gens: tuple[tuple[str, tuple[Word, ...]], ...]
    constants: tuple[tuple[str, Word], ...]

    @staticmethod
    def make(ctx: WordContext, subgroup_gens: dict, constants: dict
             ) -> "FreeCosetSpec":
        return FreeCosetSpec(
            ctx,
            tuple(sorted((n, tuple(ctx.reduce(w) for w in gens))
                         for n, gens in subgroup_gens.items())),
            tuple(sorted((n, ctx.reduce(w)) for n, w in constants.items())))

    @property
    def slots(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.subgroup_gens)

    def gens_of(self, slot: str) -> tuple[Word, ...]:
        for n, gens in self.subgroup_gens:
            if n == slot:
                return gens
        if slot == TRIVIAL_SLOT:
            return ()
        raise InputError(f"unknown subgroup slot {slot!r}")

    def constant(self, name: str | None) -> Word:
        if name is None:
            return EMPTY_WORD
        for n, w in self.constants:
            if n == name:
                return w
        raise InputError(f"unknown constant {name!r}")

    def induced_finite(self, q: FiniteQuotient) -> FiniteCosetSpec:
        """Push the spec through a quotient: the group is the closed image,
        each subgroup the image of its generators, constants their images."""
        images = [q.image(n) for n in self.ctx.names]
        carrier = tuple(str(i) for i in range(q.degree))
        if images:
            group = close_group(tuple(images), carrier=carrier)
        else:
            group = PermGroup(carrier, (), (Perm.identity(q.degree),))
        subs = {n: [quotient_image(w, q, self.ctx) for w in gens]
                for n, gens in self.subgroup_gens}
        consts = {n: quotient_image(w, q, self.ctx) for n, w in self.constants}
        return FiniteCosetSpec.make(group, subs, consts)


def solve_left_system(spec: FiniteCosetSpec, system: LeftSystem,
                      cap: int = DEFAULT_GROUP_CAP) -> dict[str, Perm] | None:
    """Least satisfying assignment (variables in declared order, values in the
    group's canonical element order), or None.

    Variables range over the whole group; each equation is checked by the
    direct coset test as soon as its variables are assigned.
    """
    if spec.group.order > cap:
        raise CapExceeded(f"group order {spec.group.order} exceeds cap {cap}")
    variables = system.variables
    n = len(variables)
    if n == 0:
        for eq in system.equations:
            raise InputError("equation without declared variables")
        return {}
    pos = {v: i for i, v in enumerate(variables)}
    by_last: list[list[Equation]] = [[] for _ in variables]
    for eq in system.equations:
        by_last[max(pos[v] for v in eq.variables())].append(eq)

    elements = spec.group.elements
    m = len(elements)
    assignment: list[Perm | None] = [None] * n

    def satisfied(eq: Equation) -> bool:
        x = assignment[pos[eq.lhs]]
        rhs = spec.constant(eq.rhs_const)
        if eq.rhs_var is not None:
            rhs = assignment[pos[eq.rhs_var]] * rhs
        return x.inv() * rhs in spec.subgroup(eq.slot)

    idx = [0] * n
    j = 0
    assignment[0] = elements[0]
    while True:
        if all(satisfied(eq) for eq in by_last[j]):
            if j == n - 1:
                return {variables[i]: assignment[i] for i in range(n)}
            j += 1
            idx[j] = 0
            assignment[j] = elements[0]
            continue
        while idx[j] == m - 1:
            assignment[j] = None
            j -= 1
            if j < 0:
                return None
        idx[j] += 1
        assignment[j] = elements[idx[j]]


def encode_nonmembership(gamma: str, eta: str, slot: str,
                         var: str = "x") -> LeftSystem:
    """Two equations whose joint unsolvability says gamma^-1 eta is outside
    the slot's subgroup."""
    constants = [gamma] + ([eta] if eta != gamma else [])
    return LeftSystem.make([var], constants, [
        (var, slot, None, gamma),
        (var, slot, None, eta),
    ])


def encode_no_translate(gammas, etas, slots) -> LeftSystem:
    """2m equations whose joint unsolvability says no single g left-translates
    every eta-coset onto the matching gamma-coset."""
    gammas, etas, slots = list(gammas), list(etas), list(slots)
    if not len(gammas) == len(etas) == len(slots):
        raise InputError("need equally many constants and slots")
    m = len(gammas)
    variables = ["x"] + [f"x{j + 1}" for j in range(m)]
    constants = []
    for c in gammas + etas:
        if c not in constants:
            constants.append(c)
    equations = []
    for j in range(m):
        equations.append((f"x{j + 1}", slots[j], None, gammas[j]))
        equations.append((f"x{j + 1}", slots[j], "x", etas[j]))
    return LeftSystem.make(variables, constants, equations)


def _fresh_names(existing, count: int, stem: str = "x") -> list[str]:
    out = []
    taken = set(existing)
    j = 1
    while len(out) < count:
        name = f"{stem}!{j}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        j += 1
    return out


def normalize_system(system: LeftSystem, stage: str) -> LeftSystem:
    """Solution-preserving rewrites.

    stage "star": equations with a constant-only right side all share one
    fresh variable y, x H = g H becoming x H = y g H (a solution extends by
    y = identity; conversely left-translating by y^-1 recovers one).

    stage "prime": additionally split every remaining equation through the
    trivial slot so each equation reads x H_i = y H_i or x H0 = y g H0.
    """
    if stage not in ("star", "prime"):
        raise InputError("stage must be 'star' or 'prime'")

    const_only = [eq for eq in system.equations if eq.rhs_var is None]
    variables = list(system.variables)
    equations = list(system.equations)
    if const_only:
        (y,) = _fresh_names(variables, 1)
        variables.append(y)
        equations = [
            Equation(eq.lhs, eq.slot, y, eq.rhs_const) if eq.rhs_var is None
            else eq
            for eq in equations]
    starred = LeftSystem.make(variables, system.constants, equations)
    if stage == "star":
        return starred

    out_equations: list[Equation] = []
    variables = list(starred.variables)
    for eq in starred.equations:
        if eq.rhs_const is None or eq.slot == TRIVIAL_SLOT:
            out_equations.append(eq)
            continue
        (fresh,) = _fresh_names(variables, 1)
        variables.append(fresh)
        out_equations.append(Equation(eq.lhs, eq.slot, fresh, None))
        out_equations.append(Equation(fresh, TRIVIAL_SLOT, eq.rhs_var,
                                      eq.rhs_const))
    return LeftSystem.make(variables, starred.constants, out_equations)


# -- the pattern gadget ---------------------------------------------------------


@dataclass(frozen=True)
class GadgetBundle:
    """A finite pattern structure T and the description of the coset
    structure it probes: a left system in prime normal form is solvable over
    a spec exactly when T maps homomorphically into that spec's coset
    structure (all cosets of all slots, slot membership as unary relations,
    constant translation on trivial-slot cosets as binary relations, and
    nonempty-intersection relations R_t)."""

    language: Signature
    pattern: Structure
    slots: tuple[str, ...]
    translation_constants: tuple[str, ...]
    variable_elements: tuple[tuple[str, str], ...]
    coset_structure_description: tuple[tuple[str, str], ...]


def _orientations(system: LeftSystem):
    """Equations of a prime-form system, seen from each of their variables as
    x H = eps H with eps a variable or variable*constant (constants get
    inverted when read from the right)."""
    out: dict[str, list[tuple[str, str, str | None]]] = {v: [] for v in
                                                         system.variables}
    for eq in system.equations:
        if eq.rhs_var is None:
            raise InputError("system is not in prime normal form (run "
                             "normalize_system(..., 'prime') first)")
        if eq.rhs_const is not None and eq.slot != TRIVIAL_SLOT:
            raise InputError("system is not in prime normal form")
        out[eq.lhs].append((eq.slot, eq.rhs_var, eq.rhs_const))
        inv_const = None if eq.rhs_const is None else _inv_name(eq.rhs_const)
        out[eq.rhs_var].append((eq.slot, eq.lhs, inv_const))
    return out


def _inv_name(const: str) -> str:
    return const[:-4] if const.endswith("!inv") else const + "!inv"


def system_to_gadget(system: LeftSystem, spec) -> GadgetBundle:
    """Build the probe pattern for a prime-form system over a coset spec."""
    slots = [TRIVIAL_SLOT] + [s for s in _spec_slots(spec) if s != TRIVIAL_SLOT]
    n = len(slots) - 1
    l = len(system.equations)
    a_names: list[str] = []
    for c in system.constants:
        for name in (c, _inv_name(c)):
            if name not in a_names:
                a_names.append(name)

    elements: list[str] = []
    var_coset: dict[tuple[str, str], str] = {}
    var_const_coset: dict[tuple[str, str], str] = {}
    for x in system.variables:
        for s in slots:
            e = f"{x}.{s}"
            elements.append(e)
            var_coset[(x, s)] = e
        for g in a_names:
            e = f"{x}.{g}.{TRIVIAL_SLOT}"
            elements.append(e)
            var_const_coset[(x, g)] = e

    relations: dict[str, set[tuple[str, ...]]] = {}
    signature: dict[str, int] = {}
    for s in slots:
        signature[f"S_{s}"] = 1
        relations[f"S_{s}"] = {(var_coset[(x, s)],) for x in system.variables}
        if s == TRIVIAL_SLOT:
            relations[f"S_{s}"] |= {(e,) for e in var_const_coset.values()}
    signature["U"] = 2
    relations["U"] = {(a, b) for a in elements for b in elements}
    for g in a_names:
        signature[f"B_{g}"] = 2
        relations[f"B_{g}"] = {
            (var_coset[(x, TRIVIAL_SLOT)], var_const_coset[(x, g)])
            for x in system.variables}

    oriented = _orientations(system)
    for x in system.variables:
        entries = oriented[x]
        row = [var_coset[(x, s)] for s in slots]
        slot_tuple = list(range(len(slots)))
        for slot, y, const in entries:
            slot_tuple.append(slots.index(slot))
            if const is None:
                row.append(var_coset[(y, slot)])
            else:
                row.append(var_const_coset[(y, const)])
        arity = len(row)
        if arity > 2 * l + n + 1:
            raise AssertionError("gadget arity bound violated")
        name = "R_" + "_".join(str(i) for i in slot_tuple)
        if name not in signature:
            signature[name] = arity
            relations[name] = set()
        relations[name].add(tuple(row))

    sig = Signature.of(signature)
    pattern = Structure.make(sig, elements, relations)
    if len(pattern.domain) > 1 and not is_gaifman_clique(pattern):
        raise AssertionError("gadget pattern must be a Gaifman clique")

    return GadgetBundle(
        sig, pattern, tuple(slots), tuple(a_names),
        tuple((x, var_coset[(x, TRIVIAL_SLOT)]) for x in system.variables),
        tuple((s, f"all cosets of {s}") for s in slots))


def _spec_slots(spec) -> tuple[str, ...]:
    if isinstance(spec, FiniteCosetSpec):
        return tuple(n for n, _ in spec.subgroups)
    return spec.slots


def gadget_hom_exists(bundle: GadgetBundle, spec: FiniteCosetSpec) -> bool:
    """Probe the (finite) coset structure of the spec with the pattern, as an
    implicit-structure homomorphism search."""
    group = spec.group
    cosets: list[tuple[str, frozenset[Perm], Perm]] = []
    for s in bundle.slots:
        sub = spec.subgroup(s)
        seen: set[Perm] = set()
        for g in group.elements:
            if g in seen:
                continue
            coset = frozenset(g * h for h in sub)
            seen |= coset
            cosets.append((s, coset, g))

    t = bundle.pattern
    k = len(t.domain)
    constraints: list[list[tuple[str, tuple[int, ...]]]] = [[] for _ in range(k)]
    for name, rows in t.tables:
        for row in rows:
            idx = tuple(t.index(e) for e in row)
            constraints[max(idx)].append((name, idx))

    consts = {name: spec.constant(name if not name.endswith("!inv") else None)
              for name in bundle.translation_constants}
    for name in bundle.translation_constants:
        if name.endswith("!inv"):
            consts[name] = spec.constant(name[:-4]).inv()

    def holds(name: str, ids: tuple[int, ...]) -> bool:
        elems = [cosets[i] for i in ids]
        if name == "U":
            return True
        if name.startswith("S_"):
            return elems[0][0] == name[2:]
        if name.startswith("B_"):
            (s1, _, g1), (s2, _, g2) = elems
            return (s1 == TRIVIAL_SLOT and s2 == TRIVIAL_SLOT
                    and g2 == g1 * consts[name[2:]])
        if name.startswith("R_"):
            inter = set(elems[0][1])
            for _, cs, _ in elems[1:]:
                inter &= cs
                if not inter:
                    return False
            return True
        raise AssertionError(f"unknown gadget symbol {name}")

    if k == 0:
        return True
    m = len(cosets)
    img = [-1] * k

    def ok(j: int) -> bool:
        return all(holds(name, tuple(img[i] for i in idx))
                   for name, idx in constraints[j])

    j = 0
    img[0] = 0
    while True:
        if ok(j):
            if j == k - 1:
                return True
            j += 1
            img[j] = 0
            continue
        while img[j] == m - 1:
            img[j] = -1
            j -= 1
            if j < 0:
                return False
        img[j] += 1


# -- extension-condition systems -------------------------------------------------


@dataclass(frozen=True)
class LabeledSystem:
    kind: str
    provenance: str
    system: LeftSystem


@dataclass(frozen=True)
class ExtensionConditions:
    """Left systems over the stabilizer subgroups of a structure's class
    representatives; the base map of the induced coset structure is an
    embedding and the structure avoids the forbidden patterns exactly when
    every listed system is unsolvable."""

    spec: FreeCosetSpec
    slots: tuple[str, ...]
    systems: tuple[LabeledSystem, ...]


IDENTITY_CONST = "1"


def encode_extension_conditions(c: Structure, k_set: PartialIsoSet, forbidden=(),
                                max_systems: int = 20000) -> ExtensionConditions:
    """Systems for: distinct base points stay distinct (injectivity), related
    and unrelated base tuples stay apart (exactness), and no forbidden
    pattern maps into the coset structure (freeness).

    The freeness family has one system per (class assignment, choice of one
    witness tuple per pattern relation row); the pattern maps in exactly
    when some member of the family is solvable, so freeness holds exactly
    when all are unsolvable.
    """
    fact = natural_factorization(c)
    ctx = WordContext.for_partial_isos(k_set)
    slots = tuple(f"H{i + 1}" for i in range(len(fact.classes)))

    subgroup_gens = {}
    for i, (_, rep) in enumerate(fact.classes):
        subgroup_gens[slots[i]] = stabilizer_generators(c, k_set, rep)
    constants = {IDENTITY_CONST: EMPTY_WORD}
    for i in range(len(k_set.members)):
        constants[k_set.name(i)] = ctx.letter(k_set.name(i))
    spec = FreeCosetSpec.make(ctx, subgroup_gens, constants)

    systems: list[LabeledSystem] = []

    def guard():
        if len(systems) > max_systems:
            raise CapExceeded(f"more than {max_systems} condition systems")

    # per class: the constants acting at the representative, with their values
    acting: list[list[tuple[str, str]]] = []
    for ci, (_, rep) in enumerate(fact.classes):
        cands = [(IDENTITY_CONST, rep)]
        for i, member in enumerate(k_set.members):
            val = member.apply(rep)
            if val is not None:
                cands.append((k_set.name(i), val))
        acting.append(cands)

    for ci, cands in enumerate(acting):
        for (n1, v1), (n2, v2) in itertools.combinations(cands, 2):
            if v1 != v2:
                systems.append(LabeledSystem(
                    "injectivity", f"{n1},{n2} at class {ci + 1}",
                    encode_nonmembership(n1, n2, slots[ci])))
                guard()

    for name, arity in c.sig.symbols:
        rows = c.rel(name)
        for class_tuple in itertools.product(range(len(fact.classes)),
                                             repeat=arity):
            pool = [acting[ci] for ci in class_tuple]
            positives, negatives = [], []
            for combo in itertools.product(*pool):
                values = tuple(v for _, v in combo)
                (positives if values in rows else negatives).append(combo)
            for p_combo in positives:
                for q_combo in negatives:
                    systems.append(LabeledSystem(
                        "exactness",
                        f"{name} on classes {[ci + 1 for ci in class_tuple]}",
                        encode_no_translate(
                            [n for n, _ in p_combo], [n for n, _ in q_combo],
                            [slots[ci] for ci in class_tuple])))
                    guard()

    for t in forbidden:
        systems.extend(_freeness_systems(c, t, fact, acting, slots,
                                         max_systems - len(systems)))
        guard()

    return ExtensionConditions(spec, slots, tuple(systems))


def _freeness_systems(c: Structure, t: Structure, fact, acting, slots,
                      remaining: int) -> list[LabeledSystem]:
    if remaining <= 0:
        raise CapExceeded("condition system cap hit before pattern encoding")
    out: list[LabeledSystem] = []
    l = len(t.domain)
    t_rows = [(name, row) for name, rows in t.tables for row in rows]
    for class_assignment in itertools.product(range(len(fact.classes)),
                                              repeat=l):
        witness_lists = []
        feasible = True
        for name, row in t_rows:
            classes = [class_assignment[t.index(e)] for e in row]
            witnesses = []
            for combo in itertools.product(*(acting[ci] for ci in classes)):
                if tuple(v for _, v in combo) in c.rel(name):
                    witnesses.append(combo)
            if not witnesses:
                feasible = False
                break
            witness_lists.append((row, classes, witnesses))
        if not feasible:
            continue
        total = 1
        for _, _, ws in witness_lists:
            total *= len(ws)
            if total > remaining:
                raise CapExceeded("pattern witness choices exceed the cap")
        for choice in itertools.product(*(range(len(ws))
                                          for _, _, ws in witness_lists)):
            variables = [f"y{j + 1}" for j in range(l)]
            constants: list[str] = []
            equations = []
            for c_idx, (row, classes, witnesses) in enumerate(witness_lists):
                combo = witnesses[choice[c_idx]]
                x = f"x!{c_idx + 1}"
                variables.append(x)
                for pos2, e in enumerate(row):
                    z = f"z!{c_idx + 1}.{pos2 + 1}"
                    variables.append(z)
                    slot = slots[classes[pos2]]
                    y = f"y{t.index(e) + 1}"
                    p_name = combo[pos2][0]
                    if p_name not in constants:
                        constants.append(p_name)
                    equations.append((z, slot, y, None))
                    equations.append((z, slot, x, p_name))
            out.append(LabeledSystem(
                "freeness",
                f"pattern into classes {[ci + 1 for ci in class_assignment]}",
                LeftSystem.make(variables, constants, equations)))
            if len(out) > remaining:
                raise CapExceeded("pattern witness choices exceed the cap")
    return out


# -- separation ------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationResult:
    quotient: FiniteQuotient | None
    status: str          # "found" | "exhausted" | "budget"
    tested: int


def verify_separation(spec: FreeCosetSpec, system: LeftSystem,
                      q: FiniteQuotient, cap: int = DEFAULT_GROUP_CAP) -> bool:
    """The induced finite system really is unsolvable under the quotient."""
    return solve_left_system(spec.induced_finite(q), system, cap=cap) is None


def hl_separate(spec: FreeCosetSpec, system: LeftSystem, max_degree: int = 4,
                budget: int = 100000, seed: int | None = None
                ) -> SeparationResult:
    """Search for a finite quotient under which the system (with every
    subgroup enlarged by the quotient's kernel) stays unsolvable.

    Deterministic enumeration: degree ascending, generator images in
    lexicographic one-line order.  When a seed is supplied, enumeration
    switches to seeded random sampling after half the budget.  A solvable
    system can never be separated (solutions push forward), so None answers
    are expected for those.
    """
    names = spec.ctx.names
    tested = 0
    deterministic_budget = budget if seed is None else budget // 2

    def try_quotient(q: FiniteQuotient) -> bool:
        return solve_left_system(spec.induced_finite(q), system) is None

    for degree in range(1, max_degree + 1):
        perms = [Perm(p) for p in itertools.permutations(range(degree))]
        for combo in itertools.product(perms, repeat=len(names)):
            if tested >= deterministic_budget:
                break
            q = FiniteQuotient.make(degree, dict(zip(names, combo)))
            tested += 1
            if try_quotient(q):
                return SeparationResult(q, "found", tested)
        else:
            continue
        break
    else:
        return SeparationResult(None, "exhausted", tested)

    if seed is None:
        return SeparationResult(None, "budget", tested)
    rng = random.Random(seed)
    while tested < budget:
        degree = rng.randrange(1, max_degree + 1)
        images = {n: Perm(rng.sample(range(degree), degree)) for n in names}
        q = FiniteQuotient.make(degree, images)
        tested += 1
        if try_quotient(q):
            return SeparationResult(q, "found", tested)
    return SeparationResult(None, "budget", tested)
