"""Finite towers of coherent extensions over an increasing seed chain.

Level n holds a base C_n, a minimal extension (D_n, phi_n) coherent with the
previous level's, and a saturation structure Z_n grown by attaching, for
inner triples (D, D', E) processed within budget, a coherent extension of D'
glued over its overlap; the next base amalgamates Z_n with the next seed.
All forbidden patterns must be Gaifman cliques so the amalgams stay free of
them.  Budgets make saturation partial; the report flags completeness and
every emitted object is verified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InputError
from .extensions import (HLExtension, CoherenceReport, check_coherent,
                         is_minimal, verify_hl_extension)
from .groups import Perm, close_group
from .partial_iso import enumerate_partial_isos
from .search import find_coherent_extension, find_hl_extension
from .structures import (Structure, StructureMap, extends, free_amalgamation,
                         induced_substructure, is_gaifman_clique, is_T_free)


@dataclass(frozen=True)
class TowerBudget:
    ext_slack: int = 4          # extension searches try sizes up to base+slack
    triples_cap: int = 6        # inner triples processed per level
    inner_size_cap: int = 3     # |D'| bound for processed triples
    phi_cap: int = 16           # automorphism assignments tried per (D, E)


@dataclass(frozen=True)
class TripleRecord:
    inner_base: tuple[str, ...]
    outer_base: tuple[str, ...]
    inner_ext_domain: tuple[str, ...]
    status: str                  # "attached" | "not-found-within-bound"
    attached_points: tuple[str, ...]


@dataclass(frozen=True)
class TowerLevel:
    index: int
    base: Structure
    ext: HLExtension
    saturated: Structure
    coherent_with_prev: CoherenceReport | None
    saturation: tuple[TripleRecord, ...]
    saturation_complete: bool


@dataclass(frozen=True)
class TowerResult:
    levels: tuple[TowerLevel, ...]
    status: str                  # "complete" | "budget"
    notes: tuple[str, ...]


def _minimal_extensions_inside(big: Structure, inner: Structure,
                               ext_candidate: Structure, phi_cap: int):
    """Minimal valid assignments making ext_candidate an extension of inner,
    with automorphisms drawn from ext_candidate's own automorphism group."""
    ps = enumerate_partial_isos(inner, nonidentity=True)
    reps = list(ps.representatives())
    n = len(ext_candidate.domain)
    autos = []
    for images in itertools.permutations(range(n)):
        perm = Perm(images)
        if _is_auto(ext_candidate, perm):
            autos.append(perm)
    per_rep: list[list[Perm]] = []
    for i in reps:
        member = ps.members[i]
        options = []
        for perm in autos:
            if ps.is_involution(i) and perm != perm.inv():
                continue
            if all(ext_candidate.domain[perm(ext_candidate.index(a))] == b
                   for a, b in member.pairs):
                options.append(perm)
        if not options:
            return
        per_rep.append(options)
    count = 0
    for combo in itertools.product(*per_rep):
        count += 1
        if count > phi_cap:
            return
        e = HLExtension.build(inner, ext_candidate, dict(zip(reps, combo)), ps=ps)
        if is_minimal(e):
            yield e


def _is_auto(s: Structure, perm: Perm) -> bool:
    for _, rows in s.tables:
        for row in rows:
            if tuple(s.domain[perm(s.index(e))] for e in row) not in rows:
                return False
    return True


def _subsets(domain, max_size):
    for k in range(1, min(len(domain), max_size) + 1):
        yield from itertools.combinations(domain, k)


def build_tower(chain, forbidden=(), levels: int = 2,
                budget: TowerBudget = TowerBudget()) -> TowerResult:
    """Grow `levels` tower levels over the increasing chain of seeds.

    Stops with status "budget" (and a partial but fully verified tower) when
    a search bound or cap is hit.
    """
    chain = list(chain)
    forbidden = tuple(forbidden)
    if not chain:
        raise InputError("need at least one seed structure")
    for t in forbidden:
        if not is_gaifman_clique(t):
            raise InputError("every forbidden pattern must be a Gaifman clique")
    for s in chain:
        ok, _ = is_T_free(s, forbidden)
        if not ok:
            raise InputError("chain members must avoid the forbidden patterns")
    for small, big in zip(chain, chain[1:]):
        if not extends(big, small):
            raise InputError("seed chain must be increasing and induced")
    while len(chain) < levels:
        chain.append(chain[-1])

    notes: list[str] = []
    out_levels: list[TowerLevel] = []
    status = "complete"
    base = chain[0]
    seed_image = {e: e for e in chain[0].domain}   # seed ids inside the base
    prev_ext: HLExtension | None = None

    for n in range(1, levels + 1):
        if prev_ext is None:
            ext = find_hl_extension(base, forbidden,
                                    max_size=len(base.domain) + budget.ext_slack)
        else:
            ext = find_coherent_extension(
                base, prev_ext, forbidden,
                max_size=len(set(prev_ext.ext.domain) | set(base.domain))
                + budget.ext_slack)
        if ext is None:
            notes.append(f"level {n}: no extension within the size budget")
            status = "budget"
            break
        coherence = check_coherent(prev_ext, ext) if prev_ext else None
        if coherence is not None and not coherence.coherent:
            raise AssertionError("search returned a non-coherent level")

        saturated, records, complete = _saturate(ext, forbidden, budget)
        if not complete:
            status = "budget"
        out_levels.append(TowerLevel(n, base, ext, saturated, coherence,
                                     tuple(records), complete))

        if n < levels:
            seed_next = chain[n]
            over_ids = [seed_image[e] for e in chain[n - 1].domain]
            over = induced_substructure(saturated, over_ids)
            emb1 = StructureMap.make(over, saturated,
                                     {e: e for e in over.domain})
            back = {seed_image[e]: e for e in chain[n - 1].domain}
            emb2 = StructureMap.make(over, seed_next,
                                     {e: back[e] for e in over.domain})
            amalgam = free_amalgamation(saturated, seed_next, over, emb1, emb2)
            base = amalgam.structure
            seed_image = {e: amalgam.into2.apply(e) for e in seed_next.domain}
        prev_ext = ext

    _verify_tower(out_levels, forbidden)
    return TowerResult(tuple(out_levels), status, tuple(notes))


def _saturate(ext: HLExtension, forbidden, budget: TowerBudget):
    """Attach coherent extensions for inner triples of the level's extension,
    processing triples in canonical order up to the cap."""
    d_n = ext.ext
    z = d_n
    records: list[TripleRecord] = []
    complete = True
    processed = 0
    for outer_ids in _subsets(d_n.domain, budget.inner_size_cap):
        outer = induced_substructure(d_n, outer_ids)
        for inner_ids in _subsets(outer_ids, len(outer_ids)):
            inner = induced_substructure(d_n, inner_ids)
            for ext_ids in _subsets(d_n.domain, budget.inner_size_cap):
                if not set(inner_ids) <= set(ext_ids):
                    continue
                candidate = induced_substructure(d_n, ext_ids)
                for e in _minimal_extensions_inside(d_n, inner, candidate,
                                                    budget.phi_cap):
                    if processed >= budget.triples_cap:
                        return z, records, False
                    processed += 1
                    union = sorted(set(ext_ids) | set(outer_ids),
                                   key=d_n.index)
                    found = find_coherent_extension(
                        outer, e, forbidden,
                        max_size=len(union) + budget.ext_slack,
                        ambient=d_n)
                    if found is None:
                        records.append(TripleRecord(
                            inner_ids, outer_ids, ext_ids,
                            "not-found-within-bound", ()))
                        complete = False
                        continue
                    overlap = sorted(set(found.ext.domain) & set(z.domain),
                                     key=found.ext.index)
                    over = induced_substructure(found.ext, overlap)
                    amalgam = free_amalgamation(z, found.ext, over)
                    z = amalgam.structure
                    new_pts = tuple(amalgam.into2.apply(e2)
                                    for e2 in found.ext.domain
                                    if amalgam.into2.apply(e2) not in
                                    set(d_n.domain))
                    records.append(TripleRecord(
                        inner_ids, outer_ids, ext_ids, "attached", new_pts))
    return z, records, complete


def _verify_tower(levels: list[TowerLevel], forbidden) -> None:
    for i, level in enumerate(levels):
        report = verify_hl_extension(level.ext, forbidden)
        if not (report.valid and report.minimal):
            raise AssertionError(f"level {level.index} extension fails checks")
        if not extends(level.ext.ext, level.base):
            raise AssertionError(f"level {level.index} base not induced")
        if not extends(level.saturated, level.ext.ext):
            raise AssertionError(f"level {level.index} saturation not induced")
        ok, _ = is_T_free(level.saturated, forbidden)
        if not ok:
            raise AssertionError(f"level {level.index} saturation not pattern-free")
        if i + 1 < len(levels):
            if not extends(levels[i + 1].base, level.saturated):
                raise AssertionError(
                    f"level {level.index} saturation not inside the next base")


def chain_report(result: TowerResult) -> dict:
    """Group orders, verified embeddings between consecutive levels, and
    orbit statistics of the generated automorphism groups."""
    levels = []
    for i, level in enumerate(result.levels):
        group = level.ext.generated_group()
        seen: set[int] = set()
        orbit_sizes: list[int] = []
        for p in range(len(level.ext.ext.domain)):
            if p in seen:
                continue
            orb = {p}
            frontier = [p]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in group.generators:
                        for y in (g(x), g.inv()(x)):
                            if y not in orb:
                                orb.add(y)
                                nxt.append(y)
                frontier = nxt
            seen |= orb
            orbit_sizes.append(len(orb))
        entry = {
            "level": level.index,
            "group_order": group.order,
            "orbit_sizes": sorted(orbit_sizes),
        }
        if i + 1 < len(result.levels):
            nxt_level = result.levels[i + 1]
            rep = check_coherent(level.ext, nxt_level.ext)
            entry["embeds_into_next"] = bool(rep.coherent)
            entry["next_subgroup_order"] = rep.restricted_order
        levels.append(entry)
    return {"levels": levels, "status": result.status}
